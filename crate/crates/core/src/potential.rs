//! Bare, tunneling-induced and effective potentials of the two spin channels.
//!
//! Dividing the coupled channel equations by `(ω/2)(1∓2g′)Ψ±` gives
//! `−Ψ″/Ψ + v± + δv± = const`, with bare potentials
//! `v± = (1±2g′)/(1∓2g′)·x²` and induced potentials
//! `δv± = −Ω/((1∓2g′)ω)·Ψ∓/Ψ±`.

use serde::Serialize;

use crate::eigen::band_to_tridiagonal;
use crate::error::{invalid, Error, Result};
use crate::exact::discrete_threshold;
use crate::grid::{second_derivative, Grid, SpinorWavefunction};
use crate::model::{build_fock_hamiltonian, FockBasisSpec, ModelParams, Spin};

/// Relative amplitude below which a ratio Ψ∓/Ψ± is not evaluated.
pub const AMPLITUDE_FLOOR: f64 = 1e-8;

/// `1 ∓ 2g′` for the spin-up (−) or spin-down (+) channel: the kinetic
/// prefactor of that channel.
fn kinetic_factor(gprime: f64, spin: Spin) -> f64 {
    1.0 - spin.sign() * 2.0 * gprime
}

/// v±(x), or `None` where the channel has no kinetic term (g′ = ±1/2).
pub fn bare_potential(params: &ModelParams, spin: Spin, x: f64) -> Option<f64> {
    let gp = params.gprime();
    let kin = kinetic_factor(gp, spin);
    if kin == 0.0 {
        return None;
    }
    Some((1.0 + spin.sign() * 2.0 * gp) / kin * x * x)
}

/// Bare potentials on a grid. A channel whose prefactor diverges
/// (v⁺ at g′ = 1/2) is `None`.
pub fn bare_potentials(params: &ModelParams, grid: &Grid) -> (Option<Vec<f64>>, Option<Vec<f64>>) {
    let curve = |spin| -> Option<Vec<f64>> {
        (0..grid.len())
            .map(|i| bare_potential(params, spin, grid.x(i)))
            .collect()
    };
    (curve(Spin::Up), curve(Spin::Down))
}

fn amplitude_mask(psi: &[f64]) -> Vec<bool> {
    let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    psi.iter()
        .map(|v| v.abs() >= AMPLITUDE_FLOOR * max && max > 0.0)
        .collect()
}

fn has_sign_change(psi: &[f64], mask: &[bool]) -> bool {
    let mut sign = 0.0;
    for (&v, &ok) in psi.iter().zip(mask) {
        if !ok {
            continue;
        }
        if sign != 0.0 && v.signum() != sign {
            return true;
        }
        sign = v.signum();
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedPotentials {
    /// δv⁺; `None` when 1 − 2g′ = 0. Masked points hold NaN.
    pub dv_plus: Option<Vec<f64>>,
    pub dv_minus: Option<Vec<f64>>,
    /// Points where |Ψ⁺| is above the amplitude floor.
    pub mask_plus: Vec<bool>,
    pub mask_minus: Vec<bool>,
    /// A component changes sign inside its valid region; the ratio is then
    /// not a potential well.
    pub sign_change: bool,
}

pub fn induced_potentials(params: &ModelParams, wf: &SpinorWavefunction) -> InducedPotentials {
    let gp = params.gprime();
    let ratio = params.tunneling() / params.omega();
    let mask_plus = amplitude_mask(&wf.psi_plus);
    let mask_minus = amplitude_mask(&wf.psi_minus);
    let channel = |spin: Spin, own: &[f64], other: &[f64], mask: &[bool]| -> Option<Vec<f64>> {
        let kin = kinetic_factor(gp, spin);
        if kin == 0.0 {
            return None;
        }
        Some(
            own.iter()
                .zip(other)
                .zip(mask)
                .map(|((&o, &t), &ok)| if ok { -ratio / kin * t / o } else { f64::NAN })
                .collect(),
        )
    };
    InducedPotentials {
        dv_plus: channel(Spin::Up, &wf.psi_plus, &wf.psi_minus, &mask_plus),
        dv_minus: channel(Spin::Down, &wf.psi_minus, &wf.psi_plus, &mask_minus),
        sign_change: has_sign_change(&wf.psi_plus, &mask_plus) || has_sign_change(&wf.psi_minus, &mask_minus),
        mask_plus,
        mask_minus,
    }
}

/// Bare, induced and effective potentials on one grid. Invalid entries
/// (undefined channel or masked point) are NaN.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialCurves {
    pub grid: Grid,
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub dv_plus: Vec<f64>,
    pub dv_minus: Vec<f64>,
    pub veff_plus: Vec<f64>,
    pub veff_minus: Vec<f64>,
    pub mask_plus: Vec<bool>,
    pub mask_minus: Vec<bool>,
    pub sign_change: bool,
    /// Set when the state comes from a regime or truncation that is not
    /// trusted (beyond collapse, or suspected truncation).
    pub untrusted: bool,
}

impl PotentialCurves {
    /// −δv⁻(0): depth of the tunneling-induced well in the spin-down channel.
    pub fn well_depth(&self) -> Option<f64> {
        let v = self.dv_minus[self.grid.center()];
        v.is_finite().then_some(-v)
    }

    /// Grid positions of strict local minima of v_eff⁻ inside the valid region.
    pub fn local_minima_minus(&self) -> Vec<f64> {
        let v = &self.veff_minus;
        (1..v.len() - 1)
            .filter(|&i| v[i - 1].is_finite() && v[i].is_finite() && v[i + 1].is_finite())
            .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
            .map(|i| self.grid.x(i))
            .collect()
    }
}

pub fn potential_curves(params: &ModelParams, wf: &SpinorWavefunction) -> PotentialCurves {
    let n = wf.grid.len();
    let nan = || vec![f64::NAN; n];
    let (v_plus, v_minus) = bare_potentials(params, &wf.grid);
    let v_plus = v_plus.unwrap_or_else(nan);
    let v_minus = v_minus.unwrap_or_else(nan);
    let induced = induced_potentials(params, wf);
    let dv_plus = induced.dv_plus.unwrap_or_else(nan);
    let dv_minus = induced.dv_minus.unwrap_or_else(nan);
    let sum = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    PotentialCurves {
        grid: wf.grid,
        veff_plus: sum(&v_plus, &dv_plus),
        veff_minus: sum(&v_minus, &dv_minus),
        v_plus,
        v_minus,
        dv_plus,
        dv_minus,
        mask_plus: induced.mask_plus,
        mask_minus: induced.mask_minus,
        sign_change: induced.sign_change,
        untrusted: params.beyond_collapse() || wf.truncation_suspect,
    }
}

/// Potential curves for g′ > 1/2, where the bare v⁻ is an inverted parabola
/// and only a finite-cutoff state exists. The result is always untrusted.
pub fn barrier_profile_beyond_collapse(params: &ModelParams, wf: &SpinorWavefunction) -> Result<PotentialCurves> {
    if params.gprime() <= 0.5 {
        return Err(Error::CouplingOutOfRange {
            gprime: params.gprime(),
            reason: "barrier profile needs g/omega > 1/2",
        });
    }
    let mut curves = potential_curves(params, wf);
    curves.untrusted = true;
    Ok(curves)
}

/// Number of levels below −ω/2 − δω at g = ω/2 in a basis with `n_max`.
pub fn count_discrete_levels(params: &ModelParams, n_max: usize, delta: f64) -> Result<usize> {
    if !params.at_collapse() {
        return Err(invalid(format!(
            "discrete levels are defined at g/omega = 1/2, got {}",
            params.gprime()
        )));
    }
    let h = build_fock_hamiltonian(params, &FockBasisSpec::full(n_max)?)?;
    Ok(band_to_tridiagonal(h.band()).count_below(discrete_threshold(params.omega(), delta)))
}

/// Largest pointwise residual of the channel equations
/// `(ω/2)[−(1∓2g′)Ψ″ + (1±2g′)x²Ψ] − (Ω/2)Ψ∓ − (E−ε₀)Ψ±`
/// over interior points where the channel amplitude is above the floor.
/// Returns `(spin-up residual, spin-down residual)`.
pub fn schrodinger_residual(params: &ModelParams, wf: &SpinorWavefunction, energy: f64) -> Result<(f64, f64)> {
    let gp = params.gprime();
    let (w, t) = (params.omega(), params.tunneling());
    let shift = energy - params.epsilon0();
    let grid = &wf.grid;
    let channel = |spin: Spin, own: &[f64], other: &[f64]| -> Result<f64> {
        let d2 = second_derivative(own, grid)?;
        let mask = amplitude_mask(own);
        let (kin, pot) = (kinetic_factor(gp, spin), 1.0 + spin.sign() * 2.0 * gp);
        Ok((1..own.len() - 1)
            .filter(|&i| mask[i])
            .map(|i| {
                let x = grid.x(i);
                let r = 0.5 * w * (-kin * d2[i] + pot * x * x * own[i]) - 0.5 * t * other[i] - shift * own[i];
                r.abs()
            })
            .fold(0.0, f64::max))
    };
    Ok((
        channel(Spin::Up, &wf.psi_plus, &wf.psi_minus)?,
        channel(Spin::Down, &wf.psi_minus, &wf.psi_plus)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ground_state;
    use crate::grid::fock_to_grid;

    fn params(omega: f64, tunneling: f64, g: f64) -> ModelParams {
        ModelParams::new(omega, tunneling, g).unwrap()
    }

    fn ed_spinor(p: &ModelParams, n_max: usize, grid: &Grid) -> (SpinorWavefunction, f64) {
        let gs = ground_state(p, &FockBasisSpec::full(n_max).unwrap()).unwrap();
        (fock_to_grid(&gs, grid).unwrap(), gs.energy)
    }

    #[test]
    fn bare_examples() {
        let grid = Grid::new(2.0, 5).unwrap();
        let (vp, vm) = bare_potentials(&params(1.0, 1.0, 0.0), &grid);
        assert_eq!(vp.unwrap(), grid.points().iter().map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(vm.unwrap(), grid.points().iter().map(|x| x * x).collect::<Vec<_>>());
        let (vp, vm) = bare_potentials(&params(1.0, 1.0, 0.5), &grid);
        assert!(vp.is_none());
        assert!(vm.unwrap().iter().all(|&v| v == 0.0));
        let v = bare_potential(&params(1.0, 1.0, 0.3), Spin::Down, 1.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn no_tunneling_no_induced_potential() {
        let p = params(1.0, 0.0, 0.3);
        let grid = Grid::default();
        let (wf, _) = ed_spinor(&params(1.0, 1e-9, 0.3), 120, &grid);
        let ind = induced_potentials(&p, &wf);
        for v in ind.dv_plus.unwrap().iter().chain(ind.dv_minus.as_ref().unwrap()) {
            assert!(v.is_nan() || *v == 0.0);
        }
    }

    #[test]
    fn collapse_point_well() {
        let p = params(1.0, 1.0, 0.5);
        let grid = Grid::new(20.0, 2001).unwrap();
        let (wf, _) = ed_spinor(&p, 1599, &grid);
        let curves = potential_curves(&p, &wf);
        assert!(curves.v_plus.iter().all(|v| v.is_nan()));
        assert!(!curves.sign_change);
        let c = grid.center();
        let depth = curves.well_depth().unwrap();
        assert!(depth > 0.0);
        for i in 0..grid.len() {
            if curves.mask_minus[i] {
                assert!(curves.dv_minus[i] >= curves.dv_minus[c] - 1e-9);
                assert_eq!(curves.veff_minus[i], curves.dv_minus[i]);
            }
        }
        // the well flattens out away from the origin
        let edge = (0..c).find(|&i| curves.mask_minus[i]).unwrap();
        assert!(curves.dv_minus[edge].abs() < 0.1 * depth);
    }

    #[test]
    fn mask_follows_amplitude_floor() {
        let p = params(1.0, 1.0, 0.3);
        let grid = Grid::new(30.0, 1501).unwrap();
        let (wf, _) = ed_spinor(&p, 400, &grid);
        let curves = potential_curves(&p, &wf);
        let max = wf.psi_plus.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..grid.len() {
            assert_eq!(curves.mask_plus[i], wf.psi_plus[i].abs() >= AMPLITUDE_FLOOR * max);
            assert_eq!(curves.dv_plus[i].is_nan(), !curves.mask_plus[i]);
        }
        assert!(!curves.mask_plus[0] && curves.mask_plus[grid.center()]);
    }

    #[test]
    fn inverted_barrier_without_tunneling() {
        let p = params(1.0, 0.0, 0.6);
        let grid = Grid::new(3.0, 61).unwrap();
        let (_, vm) = bare_potentials(&p, &grid);
        let vm = vm.unwrap();
        assert!(vm.iter().all(|&v| v <= 0.0));
        assert!(vm[0] < vm[15] && vm[15] < vm[30]);
    }

    #[test]
    fn barrier_profile_requires_beyond_collapse() {
        let grid = Grid::new(5.0, 101).unwrap();
        let (wf, _) = ed_spinor(&params(1.0, 1.0, 0.3), 60, &grid);
        assert!(barrier_profile_beyond_collapse(&params(1.0, 1.0, 0.3), &wf).is_err());
        let p = params(1.0, 1.0, 0.6);
        let curves = barrier_profile_beyond_collapse(&p, &wf).unwrap();
        assert!(curves.untrusted);
    }

    #[test]
    fn discrete_level_counts() {
        assert!(count_discrete_levels(&params(1.0, 1.0, 0.3), 100, 0.01).is_err());
        assert_eq!(count_discrete_levels(&params(1.0, 1.0, 0.5), 799, 0.01).unwrap(), 1);
    }

    #[test]
    fn residual_is_small_for_exact_state() {
        let p = params(1.0, 1.0, 0.3);
        let grid = Grid::new(10.0, 2001).unwrap();
        let (wf, e) = ed_spinor(&p, 400, &grid);
        let (up, down) = schrodinger_residual(&p, &wf, e).unwrap();
        assert!(up < 1e-4 && down < 1e-4, "{up} {down}");
        let (up_bad, _) = schrodinger_residual(&p, &wf, e + 0.1).unwrap();
        assert!(up_bad > 1e-2);
    }
}
