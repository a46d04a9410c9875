//! Model parameters, the truncated Fock basis and the Hamiltonian matrix
//! in the spin-boson representation
//!
//! ```text
//! H = ω a†a + (Ω/2) σx + g σz (a†² + a²)
//! ```

use serde::{Deserialize, Serialize};

use crate::eigen::SymmetricBand;
use crate::error::{invalid, Error, Result};

/// States kept per spin for a given cutoff: `n = 0 ..= cutoff - 1`.
pub const CUTOFF_CONVENTION: &str = "cutoff = number of Fock states per spin (n = 0..cutoff-1, n_max = cutoff-1)";

/// How an integer "cutoff" maps to the largest photon number kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffConvention {
    /// `cutoff` Fock states per spin: n_max = cutoff − 1.
    #[default]
    StatesPerSpin,
    /// Two more states than the cutoff: n_max = cutoff + 1.
    ExtendedByTwo,
}

impl CutoffConvention {
    pub fn n_max(self, cutoff: usize) -> Option<usize> {
        match self {
            Self::StatesPerSpin => cutoff.checked_sub(1),
            Self::ExtendedByTwo => cutoff.checked_add(1),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::StatesPerSpin => CUTOFF_CONVENTION,
            Self::ExtendedByTwo => "cutoff + 2 Fock states per spin (n = 0..cutoff+1, n_max = cutoff+1)",
        }
    }
}

/// Physical parameters. Energies share the units of `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    tunneling: f64,
    coupling: f64,
}

impl ModelParams {
    pub fn new(omega: f64, tunneling: f64, coupling: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(format!("omega must be positive and finite, got {omega}")));
        }
        if !(tunneling.is_finite() && tunneling >= 0.0) {
            return Err(invalid(format!(
                "tunneling Omega must be non-negative and finite, got {tunneling}"
            )));
        }
        if !coupling.is_finite() {
            return Err(invalid(format!("coupling g must be finite, got {coupling}")));
        }
        Ok(Self {
            omega,
            tunneling,
            coupling,
        })
    }

    /// Parameters from the dimensionless coupling `g/ω`.
    pub fn with_gprime(omega: f64, tunneling: f64, gprime: f64) -> Result<Self> {
        Self::new(omega, tunneling, gprime * omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Qubit splitting Ω.
    pub fn tunneling(&self) -> f64 {
        self.tunneling
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Dimensionless coupling g/ω.
    pub fn gprime(&self) -> f64 {
        self.coupling / self.omega
    }

    /// Constant energy offset ε₀ = −ω/2 of the position-space form.
    pub fn epsilon0(&self) -> f64 {
        -0.5 * self.omega
    }

    /// True beyond the spectral collapse point, where the spectrum is
    /// unbounded below and any finite-cutoff result is an artifact.
    pub fn beyond_collapse(&self) -> bool {
        self.gprime().abs() > 0.5
    }

    /// True at the collapse point |g| = ω/2 (to a relative 1e-12).
    pub fn at_collapse(&self) -> bool {
        (self.gprime().abs() - 0.5).abs() <= 1e-12
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(self.omega, self.tunneling, coupling)
    }

    pub fn with_tunneling(&self, tunneling: f64) -> Result<Self> {
        Self::new(self.omega, tunneling, self.coupling)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// +1 for up, −1 for down (the σz eigenvalue).
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    #[default]
    Full,
    EvenPhoton,
    OddPhoton,
}

/// Truncated basis |n⟩⊗|s⟩ with `n ≤ n_max`.
///
/// Ordering is lexicographic in (n, spin) with spin up first, so in the full
/// space state `(n, s)` sits at index `2n + s`. Parity sectors keep only even
/// (odd) photon numbers in the same relative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockBasisSpec {
    pub n_max: usize,
    pub sector: Sector,
}

impl FockBasisSpec {
    pub fn new(n_max: usize, sector: Sector) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid(format!(
                "n_max must be at least 2 for the two-photon term, got {n_max}"
            )));
        }
        Ok(Self { n_max, sector })
    }

    pub fn full(n_max: usize) -> Result<Self> {
        Self::new(n_max, Sector::Full)
    }

    /// Full basis holding `cutoff` Fock states per spin.
    pub fn from_cutoff(cutoff: usize) -> Result<Self> {
        Self::from_cutoff_with(cutoff, CutoffConvention::StatesPerSpin)
    }

    pub fn from_cutoff_with(cutoff: usize, convention: CutoffConvention) -> Result<Self> {
        match convention.n_max(cutoff) {
            Some(n_max) if n_max >= 2 => Self::full(n_max),
            _ => Err(invalid(format!("cutoff {cutoff} keeps fewer than 3 states per spin"))),
        }
    }

    /// Photon numbers kept in this basis, ascending.
    pub fn photon_numbers(&self) -> impl Iterator<Item = usize> {
        let (start, step) = match self.sector {
            Sector::Full => (0, 1),
            Sector::EvenPhoton => (0, 2),
            Sector::OddPhoton => (1, 2),
        };
        (start..=self.n_max).step_by(step)
    }

    pub fn photon_count(&self) -> usize {
        let m = self.n_max + 1;
        match self.sector {
            Sector::Full => m,
            Sector::EvenPhoton => m.div_ceil(2),
            Sector::OddPhoton => m / 2,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.photon_count()
    }

    /// Basis index of |n, s⟩, if the state belongs to this basis.
    pub fn index(&self, n: usize, spin: Spin) -> Option<usize> {
        if n > self.n_max {
            return None;
        }
        let slot = match self.sector {
            Sector::Full => n,
            Sector::EvenPhoton if n.is_multiple_of(2) => n / 2,
            Sector::OddPhoton if n % 2 == 1 => n / 2,
            _ => return None,
        };
        Some(2 * slot + spin.offset())
    }

    /// Inverse of [`FockBasisSpec::index`].
    pub fn state(&self, index: usize) -> (usize, Spin) {
        let slot = index / 2;
        let spin = if index.is_multiple_of(2) { Spin::Up } else { Spin::Down };
        let n = match self.sector {
            Sector::Full => slot,
            Sector::EvenPhoton => 2 * slot,
            Sector::OddPhoton => 2 * slot + 1,
        };
        (n, spin)
    }

    fn bandwidth(&self) -> usize {
        match self.sector {
            Sector::Full => 4,
            _ => 2,
        }
    }
}

/// Real symmetric Hamiltonian in a truncated Fock basis.
///
/// Only the band |i − j| ≤ 4 (full space) or ≤ 2 (parity sector) can be
/// nonzero, and only that band is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    basis: FockBasisSpec,
    params: ModelParams,
    band: SymmetricBand,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.band.dim()
    }

    pub fn basis(&self) -> &FockBasisSpec {
        &self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn band(&self) -> &SymmetricBand {
        &self.band
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.band.get(i, j)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.band.to_dense()
    }
}

/// Matrix elements of H between |n, s⟩ states:
/// `ω n` on the diagonal, `s · g √((n+1)(n+2))` between n and n + 2 in the
/// same spin, and `Ω/2` between the two spins at equal n.
pub fn build_fock_hamiltonian(params: &ModelParams, basis: &FockBasisSpec) -> Result<HamiltonianMatrix> {
    if basis.n_max < 2 {
        return Err(invalid(format!("n_max must be at least 2, got {}", basis.n_max)));
    }
    let (omega, half_tunnel, g) = (params.omega(), 0.5 * params.tunneling(), params.coupling());
    let mut band = SymmetricBand::zeros(basis.dim(), basis.bandwidth());
    for n in basis.photon_numbers() {
        let up = basis.index(n, Spin::Up).expect("photon number in basis");
        let down = basis.index(n, Spin::Down).expect("photon number in basis");
        band.set(up, up, omega * n as f64);
        band.set(down, down, omega * n as f64);
        band.set(down, up, half_tunnel);
        if n + 2 <= basis.n_max {
            let ladder = (((n + 1) * (n + 2)) as f64).sqrt();
            for spin in [Spin::Up, Spin::Down] {
                let i = basis.index(n, spin).expect("photon number in basis");
                let j = basis.index(n + 2, spin).expect("photon number in basis");
                band.set(j, i, spin.sign() * g * ladder);
            }
        }
    }
    Ok(HamiltonianMatrix {
        basis: *basis,
        params: *params,
        band,
    })
}

/// Bare polaron frequency factors `(ξ⁺, ξ⁻)` with
/// `ξ± = √((1 ± 2g′)/(1 ∓ 2g′))`, defined for |g′| < 1/2.
pub fn bare_frequencies(gprime: f64) -> Option<(f64, f64)> {
    if gprime.abs() >= 0.5 {
        return None;
    }
    let xi = ((1.0 + 2.0 * gprime) / (1.0 - 2.0 * gprime)).sqrt();
    Some((xi, 1.0 / xi))
}

/// Exact ground energy without tunneling: `(ω/2)(√(1 − 4g′²) − 1)`.
///
/// Ω is ignored.
pub fn analytic_tunneling_free_energy(params: &ModelParams) -> Result<f64> {
    let gp = params.gprime();
    if gp.abs() > 0.5 {
        return Err(Error::CouplingOutOfRange {
            gprime: gp,
            reason: "spectrum is unbounded below for |g/omega| > 1/2",
        });
    }
    let root = (1.0 - 4.0 * gp * gp).max(0.0).sqrt();
    Ok(0.5 * params.omega() * (root - 1.0))
}

/// Energy of the fixed bare state (exact at Ω = 0) with tunneling switched on:
/// `(ω/2)(√(1 − 4g′²) − 1) − (Ω/2)(1 − 4g′²)^{1/4}`.
///
/// At |g′| = 1/2 the state itself degenerates but the energy has the finite
/// limit −ω/2, which is returned.
pub fn bare_state_energy(params: &ModelParams) -> Result<f64> {
    let gp = params.gprime();
    if gp.abs() > 0.5 {
        return Err(Error::CouplingOutOfRange {
            gprime: gp,
            reason: "no bare state for |g/omega| > 1/2",
        });
    }
    let d = (1.0 - 4.0 * gp * gp).max(0.0);
    Ok(0.5 * params.omega() * (d.sqrt() - 1.0) - 0.5 * params.tunneling() * d.powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, tunneling: f64, g: f64) -> ModelParams {
        ModelParams::new(omega, tunneling, g).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(FockBasisSpec::full(1).is_err());
        assert!(FockBasisSpec::from_cutoff(2).is_err());
        assert_eq!(FockBasisSpec::from_cutoff(400).unwrap().n_max, 399);
        let wide = FockBasisSpec::from_cutoff_with(400, CutoffConvention::ExtendedByTwo).unwrap();
        assert_eq!(wide.n_max, 401);
        assert!(FockBasisSpec::from_cutoff_with(1, CutoffConvention::ExtendedByTwo).is_ok());
        assert!(FockBasisSpec::from_cutoff_with(0, CutoffConvention::ExtendedByTwo).is_err());
    }

    #[test]
    fn derived_constants() {
        let p = params(2.0, 1.0, 0.6);
        assert_eq!(p.gprime(), 0.3);
        assert_eq!(p.epsilon0(), -1.0);
        assert!(!p.beyond_collapse());
        assert!(params(1.0, 1.0, 0.5).at_collapse());
        assert!(params(1.0, 1.0, -0.6).beyond_collapse());
    }

    #[test]
    fn basis_dimensions() {
        for n_max in 2..12 {
            let full = FockBasisSpec::new(n_max, Sector::Full).unwrap();
            let even = FockBasisSpec::new(n_max, Sector::EvenPhoton).unwrap();
            let odd = FockBasisSpec::new(n_max, Sector::OddPhoton).unwrap();
            assert_eq!(full.dim(), 2 * (n_max + 1));
            assert_eq!(even.dim(), 2 * (n_max + 1).div_ceil(2));
            assert_eq!(odd.dim(), 2 * ((n_max + 1) / 2));
            assert_eq!(even.dim() + odd.dim(), full.dim());
            for b in [full, even, odd] {
                for i in 0..b.dim() {
                    let (n, s) = b.state(i);
                    assert_eq!(b.index(n, s), Some(i));
                }
            }
        }
    }

    #[test]
    fn ladder_and_tunneling_entries() {
        let p = params(1.0, 1.0, 0.3);
        let b = FockBasisSpec::full(4).unwrap();
        let h = build_fock_hamiltonian(&p, &b).unwrap();
        let up0 = b.index(0, Spin::Up).unwrap();
        let up2 = b.index(2, Spin::Up).unwrap();
        let dn0 = b.index(0, Spin::Down).unwrap();
        let dn2 = b.index(2, Spin::Down).unwrap();
        assert_eq!(h.get(up0, up2), 0.3 * 2f64.sqrt());
        assert_eq!(h.get(dn0, dn2), -0.3 * 2f64.sqrt());
        let up1 = b.index(1, Spin::Up).unwrap();
        let dn1 = b.index(1, Spin::Down).unwrap();
        assert_eq!(h.get(up1, dn1), 0.5);
        let up3 = b.index(3, Spin::Up).unwrap();
        assert_eq!(h.get(up1, up3), 0.3 * 6f64.sqrt());
    }

    #[test]
    fn free_boson_is_diagonal() {
        let h = build_fock_hamiltonian(&params(1.0, 0.0, 0.0), &FockBasisSpec::full(3).unwrap()).unwrap();
        let dense = h.to_dense();
        let expected = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0,
        ]));
        assert_eq!(dense, expected);
    }

    #[test]
    fn hermitian_and_banded() {
        let p = params(1.3, 0.7, -0.41);
        let b = FockBasisSpec::full(9).unwrap();
        let h = build_fock_hamiltonian(&p, &b).unwrap();
        let d = h.to_dense();
        assert_eq!(d, d.transpose());
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                if d[(i, j)] == 0.0 {
                    continue;
                }
                let (ni, si) = b.state(i);
                let (nj, sj) = b.state(j);
                let dn = ni.abs_diff(nj);
                assert!((si == sj && (dn == 0 || dn == 2)) || (si != sj && dn == 0));
            }
        }
    }

    #[test]
    fn parity_blocks_decouple() {
        let p = params(1.0, 2.0, 0.37);
        let full = FockBasisSpec::full(10).unwrap();
        let h = build_fock_hamiltonian(&p, &full).unwrap();
        for i in 0..full.dim() {
            for j in 0..full.dim() {
                if full.state(i).0 % 2 != full.state(j).0 % 2 {
                    assert_eq!(h.get(i, j), 0.0);
                }
            }
        }
        // sector matrices are the corresponding sub-blocks
        for sector in [Sector::EvenPhoton, Sector::OddPhoton] {
            let sb = FockBasisSpec::new(10, sector).unwrap();
            let hs = build_fock_hamiltonian(&p, &sb).unwrap();
            for i in 0..sb.dim() {
                for j in 0..sb.dim() {
                    let (ni, si) = sb.state(i);
                    let (nj, sj) = sb.state(j);
                    let fi = full.index(ni, si).unwrap();
                    let fj = full.index(nj, sj).unwrap();
                    assert_eq!(hs.get(i, j), h.get(fi, fj));
                }
            }
        }
    }

    #[test]
    fn tunneling_free_energy_closed_form() {
        assert_eq!(analytic_tunneling_free_energy(&params(1.0, 3.0, 0.0)).unwrap(), 0.0);
        let e = analytic_tunneling_free_energy(&params(1.0, 0.0, 0.3)).unwrap();
        assert!((e + 0.1).abs() < 1e-15);
        assert_eq!(analytic_tunneling_free_energy(&params(1.0, 0.0, 0.5)).unwrap(), -0.5);
        assert!(analytic_tunneling_free_energy(&params(1.0, 0.0, 0.51)).is_err());
    }

    #[test]
    fn tunneling_free_energy_matches_oscillator_oracle() {
        // H = A p² + B x² has ground energy √(AB)
        for gp in [0.0f64, 0.1, 0.25, 0.3, 0.45, 0.5] {
            let a = 0.5 * (1.0 - 2.0 * gp);
            let b = 0.5 * (1.0 + 2.0 * gp);
            let oracle = (a * b).sqrt() - 0.5;
            let e = analytic_tunneling_free_energy(&params(1.0, 0.0, gp)).unwrap();
            assert!((e - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn bare_state_energy_values() {
        assert!((bare_state_energy(&params(1.0, 1.0, 0.0)).unwrap() + 0.5).abs() < 1e-15);
        let e = bare_state_energy(&params(1.0, 1.0, 0.4)).unwrap();
        assert!((e - (-0.2 - 0.5 * 0.36f64.powf(0.25))).abs() < 1e-14);
        let near = bare_state_energy(&params(1.0, 1.0, 0.5 - 1e-12)).unwrap();
        assert!((near + 0.5).abs() < 1e-2);
        assert_eq!(bare_state_energy(&params(1.0, 1.0, 0.5)).unwrap(), -0.5);
        assert!(bare_state_energy(&params(1.0, 1.0, 0.6)).is_err());
    }
}
