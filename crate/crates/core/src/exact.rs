//! Exact diagonalization: eigenpairs, ground states and parameter scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{band_to_tridiagonal, inverse_iteration, SymmetricBand};
use crate::error::{invalid, Error, Result};
use crate::model::{build_fock_hamiltonian, CutoffConvention, FockBasisSpec, HamiltonianMatrix, ModelParams, Spin};

/// Default threshold (in units of ω) separating discrete levels from the
/// collapsed quasi-continuum at g = ω/2.
pub const DEFAULT_DISCRETE_DELTA: f64 = 0.01;

/// Default number of levels kept in scans.
pub const DEFAULT_SCAN_LEVELS: usize = 60;

/// Lowest eigenpairs of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution {
    /// Ascending eigenvalues.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors matching `energies`, when requested.
    pub vectors: Option<Vec<Vec<f64>>>,
    /// Largest `‖Hv − Ev‖` over the returned pairs.
    pub residual_norm: Option<f64>,
}

fn residual_tolerance(band: &SymmetricBand) -> f64 {
    1e-9 * band.inf_norm().max(1.0)
}

fn check_k(k: usize, dim: usize) -> Result<()> {
    if k == 0 || k > dim {
        return Err(invalid(format!(
            "requested {k} eigenpairs from a matrix of dimension {dim}"
        )));
    }
    Ok(())
}

/// `k` lowest eigenvalues of a symmetric band matrix, without vectors.
pub fn band_eigenvalues(band: &SymmetricBand, k: usize) -> Result<Vec<f64>> {
    check_k(k, band.dim())?;
    let t = band_to_tridiagonal(band);
    if 2 * k > band.dim() {
        let mut all = t.all_eigenvalues()?;
        all.truncate(k);
        Ok(all)
    } else {
        Ok(t.lowest(k))
    }
}

/// `k` lowest eigenpairs of a symmetric band matrix.
pub fn solve_band(band: &SymmetricBand, k: usize) -> Result<EigenSolution> {
    let energies = band_eigenvalues(band, k)?;
    let (vectors, residual) = inverse_iteration(band, &energies, residual_tolerance(band))?;
    Ok(EigenSolution {
        energies,
        vectors: Some(vectors),
        residual_norm: Some(residual),
    })
}

/// `k` lowest eigenpairs of `h`.
pub fn solve(h: &HamiltonianMatrix, k: usize) -> Result<EigenSolution> {
    solve_band(h.band(), k)
}

/// `k` lowest eigenvalues of `h`.
pub fn eigenvalues(h: &HamiltonianMatrix, k: usize) -> Result<Vec<f64>> {
    band_eigenvalues(h.band(), k)
}

/// An eigenvector expressed over the Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    pub coefficients: Vec<f64>,
    pub basis: FockBasisSpec,
    pub energy: f64,
}

/// Width of the photon-number window whose weight is reported as tail mass.
pub const TAIL_WINDOW: usize = 10;
/// Tail mass above which a state is flagged as possibly truncated.
pub const TAIL_THRESHOLD: f64 = 1e-6;

impl FockState {
    pub fn coefficient(&self, n: usize, spin: Spin) -> f64 {
        self.basis.index(n, spin).map_or(0.0, |i| self.coefficients[i])
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Weight Σ|c|² on photon numbers above `n_max − 10`.
    pub fn tail_mass(&self) -> f64 {
        let cut = self.basis.n_max.saturating_sub(TAIL_WINDOW);
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.state(*i).0 > cut)
            .map(|(_, c)| c * c)
            .sum()
    }

    pub fn truncation_suspect(&self) -> bool {
        self.tail_mass() > TAIL_THRESHOLD
    }
}

/// The `k` lowest eigenstates of the model in `basis`.
pub fn eigenstates(params: &ModelParams, basis: &FockBasisSpec, k: usize) -> Result<Vec<FockState>> {
    let h = build_fock_hamiltonian(params, basis)?;
    let sol = solve(&h, k)?;
    let vectors = sol.vectors.expect("solve returns vectors");
    Ok(sol
        .energies
        .into_iter()
        .zip(vectors)
        .map(|(energy, coefficients)| FockState {
            coefficients,
            basis: *basis,
            energy,
        })
        .collect())
}

/// Ground state of the model in `basis`.
pub fn ground_state(params: &ModelParams, basis: &FockBasisSpec) -> Result<FockState> {
    Ok(eigenstates(params, basis, 1)?.remove(0))
}

/// Energy below which a level at g = ω/2 counts as discrete.
pub fn discrete_threshold(omega: f64, delta: f64) -> f64 {
    -0.5 * omega - delta * omega
}

/// Label of a level at the collapse point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelKind {
    /// Bound level below −ω/2 − δω.
    Discrete,
    /// Level at or above −ω/2 − δω.
    Collapsed,
}

/// `delta` is in units of ω.
pub fn classify_level(energy: f64, omega: f64, delta: f64) -> LevelKind {
    if energy < discrete_threshold(omega, delta) {
        LevelKind::Discrete
    } else {
        LevelKind::Collapsed
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub allow_beyond_collapse: bool,
    /// Discreteness threshold in units of ω.
    pub delta: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            allow_beyond_collapse: false,
            delta: DEFAULT_DISCRETE_DELTA,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub gprime: f64,
    pub levels: Vec<f64>,
    /// Present only at the collapse point.
    pub kinds: Option<Vec<LevelKind>>,
    /// Set beyond the collapse point, where finite-cutoff levels are artifacts.
    pub untrusted: bool,
}

/// Lowest `k` levels for each coupling in `g_values` (energy units), sorted
/// by g/ω.
pub fn scan_coupling(
    base: &ModelParams,
    g_values: &[f64],
    n_max: usize,
    k: usize,
    options: &ScanOptions,
) -> Result<Vec<SpectrumRow>> {
    let basis = FockBasisSpec::full(n_max)?;
    let k = k.min(basis.dim());
    let mut rows = g_values
        .par_iter()
        .map(|&g| {
            let params = base.with_coupling(g)?;
            if params.beyond_collapse() && !options.allow_beyond_collapse {
                return Err(Error::CouplingOutOfRange {
                    gprime: params.gprime(),
                    reason: "beyond the collapse point; set allow_beyond_collapse to scan anyway",
                });
            }
            let levels = eigenvalues(&build_fock_hamiltonian(&params, &basis)?, k)?;
            let kinds = params.at_collapse().then(|| {
                levels
                    .iter()
                    .map(|&e| classify_level(e, params.omega(), options.delta))
                    .collect()
            });
            Ok(SpectrumRow {
                gprime: params.gprime(),
                levels,
                kinds,
                untrusted: params.beyond_collapse(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.gprime.total_cmp(&b.gprime));
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub cutoff: usize,
    /// E0/ω
    pub e0: f64,
    /// E1/ω
    pub e1: f64,
}

/// Ground and first excited energies as a function of the Fock cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffScanTable {
    pub params: ModelParams,
    pub convention: CutoffConvention,
    pub rows: Vec<CutoffRow>,
    pub untrusted: bool,
}

/// Independent diagonalizations for each cutoff (Fock states per spin).
pub fn scan_cutoff(params: &ModelParams, cutoffs: &[usize]) -> Result<CutoffScanTable> {
    scan_cutoff_with(params, cutoffs, CutoffConvention::StatesPerSpin)
}

pub fn scan_cutoff_with(
    params: &ModelParams,
    cutoffs: &[usize],
    convention: CutoffConvention,
) -> Result<CutoffScanTable> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("cutoffs must be strictly increasing"));
    }
    let omega = params.omega();
    let rows = cutoffs
        .par_iter()
        .map(|&cutoff| {
            let basis = FockBasisSpec::from_cutoff_with(cutoff, convention)?;
            let levels = eigenvalues(&build_fock_hamiltonian(params, &basis)?, 2)?;
            Ok(CutoffRow {
                cutoff,
                e0: levels[0] / omega,
                e1: levels[1] / omega,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CutoffScanTable {
        params: *params,
        convention,
        rows,
        untrusted: params.beyond_collapse(),
    })
}

/// Outcome of a cutoff-convergence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    /// Every step changes E0 by less than the plateau tolerance.
    Converged,
    /// An initial plateau followed by a drop larger than the drop tolerance.
    SpuriousPlateau,
    /// E0 falls by more than the drop tolerance at every step.
    Divergent,
    /// None of the above patterns.
    Inconclusive,
}

/// Classifies the E0 column of a cutoff scan (values in units of ω).
pub fn classify_convergence(table: &CutoffScanTable, plateau_tol: f64, drop_tol: f64) -> Result<Convergence> {
    if table.rows.len() < 3 {
        return Err(Error::InsufficientRows {
            needed: 3,
            got: table.rows.len(),
        });
    }
    let steps: Vec<f64> = table.rows.windows(2).map(|w| w[1].e0 - w[0].e0).collect();
    if steps.iter().all(|d| d.abs() < plateau_tol) {
        return Ok(Convergence::Converged);
    }
    if steps.iter().all(|&d| d < -drop_tol) {
        return Ok(Convergence::Divergent);
    }
    let plateau = steps.iter().take_while(|d| d.abs() < plateau_tol).count();
    if plateau >= 1 && steps[plateau] < -drop_tol {
        return Ok(Convergence::SpuriousPlateau);
    }
    Ok(Convergence::Inconclusive)
}

/// Least-squares line `y = slope·x + intercept` with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid(
            "linear fit needs two equally long series of at least two points",
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("linear fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseRow {
    /// Ω/ω
    pub tunneling_ratio: f64,
    pub levels: Vec<f64>,
    /// Number of levels below −ω/2 − δ (counted over the whole spectrum).
    pub discrete_count: usize,
    /// Successive differences E_{i+1} − E_i of `levels`.
    pub spacings: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseScan {
    pub omega: f64,
    pub rows: Vec<CollapseRow>,
    /// Fit of E0/ω against Ω/ω; absent for fewer than two rows.
    pub ground_fit: Option<LinearFit>,
}

/// Spectrum at g = ω/2 for each tunneling strength in `tunneling_values`.
pub fn scan_tunneling_at_collapse(
    omega: f64,
    tunneling_values: &[f64],
    n_max: usize,
    k: usize,
    delta: f64,
) -> Result<CollapseScan> {
    let basis = FockBasisSpec::full(n_max)?;
    let k = k.min(basis.dim());
    let mut rows = tunneling_values
        .par_iter()
        .map(|&tunneling| {
            let params = ModelParams::new(omega, tunneling, 0.5 * omega)?;
            let h = build_fock_hamiltonian(&params, &basis)?;
            let t = band_to_tridiagonal(h.band());
            let discrete_count = t.count_below(discrete_threshold(omega, delta));
            let levels = if 2 * k > basis.dim() {
                let mut all = t.all_eigenvalues()?;
                all.truncate(k);
                all
            } else {
                t.lowest(k)
            };
            let spacings = levels.windows(2).map(|w| w[1] - w[0]).collect();
            Ok(CollapseRow {
                tunneling_ratio: tunneling / omega,
                levels,
                discrete_count,
                spacings,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.tunneling_ratio.total_cmp(&b.tunneling_ratio));
    let x: Vec<f64> = rows.iter().map(|r| r.tunneling_ratio).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.levels[0] / omega).collect();
    let ground_fit = (rows.len() >= 2).then(|| linear_fit(&x, &y)).transpose()?;
    Ok(CollapseScan {
        omega,
        rows,
        ground_fit,
    })
}

/// Fraction of `levels` inside `[−ω/2, −ω/2 + window]`.
pub fn collapse_fraction(levels: &[f64], omega: f64, window: f64) -> f64 {
    if levels.is_empty() {
        return 0.0;
    }
    let lo = -0.5 * omega;
    let inside = levels.iter().filter(|&&e| e >= lo && e <= lo + window).count();
    inside as f64 / levels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, tunneling: f64, g: f64) -> ModelParams {
        ModelParams::new(omega, tunneling, g).unwrap()
    }

    #[test]
    fn solve_small_diagonal() {
        let mut band = SymmetricBand::zeros(4, 1);
        band.set(2, 2, 1.0);
        band.set(3, 3, 1.0);
        let sol = solve_band(&band, 2).unwrap();
        assert_eq!(sol.energies.len(), 2);
        assert!(sol.energies.iter().all(|e| e.abs() < 1e-14));
    }

    #[test]
    fn decoupled_qubit_ground_energy() {
        let h = build_fock_hamiltonian(&params(1.0, 1.0, 0.0), &FockBasisSpec::full(10).unwrap()).unwrap();
        let sol = solve(&h, 1).unwrap();
        assert!((sol.energies[0] + 0.5).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_k() {
        let h = build_fock_hamiltonian(&params(1.0, 1.0, 0.1), &FockBasisSpec::full(4).unwrap()).unwrap();
        assert!(solve(&h, 0).is_err());
        assert!(solve(&h, 11).is_err());
        assert!(solve(&h, 10).is_ok());
    }

    #[test]
    fn eigenpairs_match_dense_reference() {
        for (gp, tunneling, n_max) in [(0.2, 1.0, 30), (0.45, 3.0, 41), (0.5, 1.0, 60), (-0.3, 0.5, 25)] {
            let h = build_fock_hamiltonian(&params(1.0, tunneling, gp), &FockBasisSpec::full(n_max).unwrap()).unwrap();
            let mut reference: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let k = 12;
            let sol = solve(&h, k).unwrap();
            let norm = h.band().inf_norm();
            for i in 0..k {
                assert!((sol.energies[i] - reference[i]).abs() < 1e-12 * norm, "level {i}");
            }
            assert!(sol.residual_norm.unwrap() <= 1e-9 * norm.max(1.0));
            let vecs = sol.vectors.unwrap();
            for i in 0..k {
                for j in 0..k {
                    let d: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-10);
                }
            }
            let full = eigenvalues(&h, h.dim()).unwrap();
            for i in 0..h.dim() {
                assert!((full[i] - reference[i]).abs() < 1e-12 * norm);
            }
        }
    }

    #[test]
    fn decoupled_spectrum_scan() {
        let base = params(1.0, 2.0, 0.0);
        let rows = scan_coupling(&base, &[0.0], 8, 6, &ScanOptions::default()).unwrap();
        let expected = [-1.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        for (e, want) in rows[0].levels.iter().zip(expected) {
            assert!((e - want).abs() < 1e-12);
        }
        assert!(rows[0].kinds.is_none());
    }

    #[test]
    fn scan_rejects_beyond_collapse_unless_allowed() {
        let base = params(1.0, 1.0, 0.0);
        assert!(scan_coupling(&base, &[0.6], 20, 4, &ScanOptions::default()).is_err());
        let opts = ScanOptions {
            allow_beyond_collapse: true,
            ..Default::default()
        };
        let rows = scan_coupling(&base, &[0.6, 0.1], 20, 4, &opts).unwrap();
        assert_eq!(rows[0].gprime, 0.1);
        assert!(!rows[0].untrusted);
        assert!(rows[1].untrusted);
    }

    #[test]
    fn collapse_point_levels_are_labelled() {
        let rows = scan_coupling(&params(1.0, 1.0, 0.0), &[0.5], 200, 5, &ScanOptions::default()).unwrap();
        let kinds = rows[0].kinds.as_ref().unwrap();
        assert_eq!(kinds[0], LevelKind::Discrete);
        assert!(kinds[1..].iter().all(|k| *k == LevelKind::Collapsed));
    }

    #[test]
    fn cutoff_scan_requires_increasing_cutoffs() {
        assert!(scan_cutoff(&params(1.0, 1.0, 0.3), &[100, 50]).is_err());
    }

    fn table(e0: &[f64]) -> CutoffScanTable {
        CutoffScanTable {
            params: params(1.0, 1.0, 0.3),
            convention: CutoffConvention::StatesPerSpin,
            rows: e0
                .iter()
                .enumerate()
                .map(|(i, &e)| CutoffRow {
                    cutoff: 100 * (i + 1),
                    e0: e,
                    e1: e + 1.0,
                })
                .collect(),
            untrusted: false,
        }
    }

    #[test]
    fn convergence_patterns() {
        assert_eq!(
            classify_convergence(&table(&[-1.0, -1.0, -1.0]), 1e-6, 0.1).unwrap(),
            Convergence::Converged
        );
        assert_eq!(
            classify_convergence(&table(&[0.0, -1.0, -2.0, -3.0]), 1e-6, 0.5).unwrap(),
            Convergence::Divergent
        );
        assert_eq!(
            classify_convergence(&table(&[-50.0, -50.0, -50.0, -51.1, -58.4]), 1e-6, 0.5).unwrap(),
            Convergence::SpuriousPlateau
        );
        assert_eq!(
            classify_convergence(&table(&[-1.0, -1.01, -1.02]), 1e-6, 0.5).unwrap(),
            Convergence::Inconclusive
        );
        assert!(matches!(
            classify_convergence(&table(&[-1.0, -1.0]), 1e-6, 0.5),
            Err(Error::InsufficientRows { .. })
        ));
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tail_mass_flags_truncation() {
        let gs = ground_state(&params(1.0, 1.0, 0.3), &FockBasisSpec::full(120).unwrap()).unwrap();
        assert!((gs.norm() - 1.0).abs() < 1e-12);
        assert!(!gs.truncation_suspect());
        let squeezed = ground_state(&params(1.0, 1.0, 0.49), &FockBasisSpec::full(12).unwrap()).unwrap();
        assert!(squeezed.truncation_suspect());
    }
}
