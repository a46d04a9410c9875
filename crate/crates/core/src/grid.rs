//! Position-space representation: uniform grids, oscillator eigenfunctions
//! and spinor wavefunctions Ψ±(x) reconstructed from Fock-basis states.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::FockState;
use crate::model::Spin;

/// Uniform grid on `[-half_width, half_width]` with an odd number of points,
/// so that x = 0 is a grid point and the grid is mirror symmetric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            n_points: 2001,
        }
    }
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(invalid(format!(
                "grid needs an odd number of points >= 3, got {n_points}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("grid half width must be positive, got {half_width}")));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn x_min(&self) -> f64 {
        -self.half_width
    }

    pub fn x_max(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Index of x = 0.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    /// Grid point `i`; `x(center ± j) = ±j·h` exactly.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    fn check(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.n_points {
            return Err(Error::GridMismatch {
                expected: self.n_points,
                got: samples.len(),
            });
        }
        Ok(())
    }
}

/// Trapezoid-rule `∫ f g dx` over the grid.
pub fn quadrature_inner(f: &[f64], g: &[f64], grid: &Grid) -> Result<f64> {
    grid.check(f)?;
    grid.check(g)?;
    let n = f.len();
    let interior: f64 = (1..n - 1).map(|i| f[i] * g[i]).sum();
    Ok(grid.spacing() * (interior + 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1])))
}

/// Central second difference; the two end points are left at zero.
pub fn second_derivative(f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check(f)?;
    let h2 = grid.spacing().powi(2);
    let mut out = vec![0.0; f.len()];
    for i in 1..f.len() - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    Ok(out)
}

const RESCALE: f64 = 1e150;

/// Calls `visit(n, φ_n(x))` for n = 0..=n_max, where φ_n is the normalized
/// unit-frequency oscillator eigenfunction.
///
/// Uses the three-term recurrence
/// `φ_n = √(2/n) x φ_{n−1} − √((n−1)/n) φ_{n−2}` with the Gaussian factor
/// carried as a separate exponent, so large |x| neither underflows φ_0 nor
/// overflows intermediate values.
pub fn for_each_oscillator(n_max: usize, x: f64, mut visit: impl FnMut(usize, f64)) {
    let mut log_scale = -0.5 * x * x;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    visit(0, cur * factor);
    for n in 1..=n_max {
        let nf = n as f64;
        let next = (2.0 / nf).sqrt() * x * cur - ((nf - 1.0) / nf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
            factor = log_scale.exp();
        }
        visit(n, cur * factor);
    }
}

/// φ_n(x) for a single `n`.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> f64 {
    let mut value = 0.0;
    for_each_oscillator(n, x, |k, v| {
        if k == n {
            value = v;
        }
    });
    value
}

/// Normalized Gaussian `(ξ/π)^{1/4} exp(−ξ x²/2)`: the oscillator ground
/// state at frequency ξω.
pub fn gaussian(xi: f64, x: f64) -> f64 {
    (xi / PI).powf(0.25) * (-0.5 * xi * x * x).exp()
}

/// Spinor components of |G⟩ = (Ψ⁺|↑⟩ − Ψ⁻|↓⟩)/√2 sampled on a grid.
///
/// With this convention ½(⟨Ψ⁺|Ψ⁺⟩ + ⟨Ψ⁻|Ψ⁻⟩) = 1, and the global sign is
/// chosen so that Ψ⁺(0) ≥ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorWavefunction {
    pub grid: Grid,
    pub psi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
    /// Propagated from the source state's truncation check.
    pub truncation_suspect: bool,
}

impl SpinorWavefunction {
    pub fn new(grid: Grid, psi_plus: Vec<f64>, psi_minus: Vec<f64>) -> Result<Self> {
        grid.check(&psi_plus)?;
        grid.check(&psi_minus)?;
        let mut wf = Self {
            grid,
            psi_plus,
            psi_minus,
            truncation_suspect: false,
        };
        wf.fix_sign();
        Ok(wf)
    }

    /// Flips the overall sign so that Ψ⁺(0) ≥ 0. If Ψ⁺(0) vanishes the
    /// largest-magnitude sample of Ψ⁺ is made positive instead.
    pub fn fix_sign(&mut self) {
        let c = self.grid.center();
        let reference = if self.psi_plus[c] != 0.0 {
            self.psi_plus[c]
        } else {
            self.psi_plus
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0)
        };
        if reference < 0.0 {
            self.psi_plus.iter_mut().for_each(|v| *v = -*v);
            self.psi_minus.iter_mut().for_each(|v| *v = -*v);
        }
    }

    pub fn component(&self, spin: Spin) -> &[f64] {
        match spin {
            Spin::Up => &self.psi_plus,
            Spin::Down => &self.psi_minus,
        }
    }

    /// ½(∫Ψ⁺² + ∫Ψ⁻²) by the trapezoid rule.
    pub fn norm(&self) -> f64 {
        let p = quadrature_inner(&self.psi_plus, &self.psi_plus, &self.grid).expect("own grid");
        let m = quadrature_inner(&self.psi_minus, &self.psi_minus, &self.grid).expect("own grid");
        0.5 * (p + m)
    }
}

/// Reconstructs Ψ±(x) from Fock coefficients:
/// `Ψ⁺ = √2 Σ c_{n↑} φ_n`, `Ψ⁻ = −√2 Σ c_{n↓} φ_n`.
pub fn fock_to_grid(state: &FockState, grid: &Grid) -> Result<SpinorWavefunction> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(invalid(format!("Fock state is not normalized (norm {norm})")));
    }
    let basis = &state.basis;
    let n_max = basis.n_max;
    let up: Vec<f64> = (0..=n_max).map(|n| state.coefficient(n, Spin::Up)).collect();
    let down: Vec<f64> = (0..=n_max).map(|n| state.coefficient(n, Spin::Down)).collect();
    let root2 = std::f64::consts::SQRT_2;
    let mut plus = Vec::with_capacity(grid.len());
    let mut minus = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let (mut p, mut m) = (0.0, 0.0);
        for_each_oscillator(n_max, grid.x(i), |n, phi| {
            p += up[n] * phi;
            m += down[n] * phi;
        });
        plus.push(root2 * p);
        minus.push(-root2 * m);
    }
    let mut wf = SpinorWavefunction::new(*grid, plus, minus)?;
    wf.truncation_suspect = state.truncation_suspect();
    Ok(wf)
}
