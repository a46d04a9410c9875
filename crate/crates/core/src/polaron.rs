//! Multi-polaron variational ground states.
//!
//! Each spin channel is expanded in normalized Gaussians of different widths,
//!
//! ```text
//! Ψ⁺(x) = Σ_n α_n φ(ξ⁺_n, x),   Ψ⁻(x) = Σ_n β_n φ(ξ⁻_n, x),
//! φ(ξ, x) = (ξ/π)^{1/4} exp(−ξ x²/2),
//! ```
//!
//! and |G⟩ = (Ψ⁺|↑⟩ − Ψ⁻|↓⟩)/√2. For fixed frequencies the optimal weights
//! solve a small generalized eigenproblem; the frequencies are found by a
//! multi-start simplex search over log ξ.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{gaussian, Grid, SpinorWavefunction};
use crate::model::{bare_frequencies, ModelParams};
use crate::optim::NelderMead;

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_finite() && xi > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("frequency factor must be positive, got {xi}")))
    }
}

fn overlap_unchecked(a: f64, b: f64) -> f64 {
    let s = a + b;
    SQRT_2 * (a * b / (s * s)).powf(0.25)
}

/// `⟨φ(ξ_a)|φ(ξ_b)⟩ = √2 [ξ_a ξ_b/(ξ_a+ξ_b)²]^{1/4}`.
pub fn overlap(xi_a: f64, xi_b: f64) -> Result<f64> {
    check_xi(xi_a)?;
    check_xi(xi_b)?;
    Ok(overlap_unchecked(xi_a, xi_b))
}

/// `⟨φ(ξ_a)|x²|φ(ξ_b)⟩ = S/(ξ_a+ξ_b)`.
pub fn moment_x2(xi_a: f64, xi_b: f64) -> Result<f64> {
    Ok(overlap(xi_a, xi_b)? / (xi_a + xi_b))
}

/// `⟨φ(ξ_a)|p²|φ(ξ_b)⟩ = S ξ_a ξ_b/(ξ_a+ξ_b)`.
pub fn kinetic(xi_a: f64, xi_b: f64) -> Result<f64> {
    Ok(overlap(xi_a, xi_b)? * xi_a * xi_b / (xi_a + xi_b))
}

/// Frequencies and weights of a multi-polaron state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaronAnsatz {
    /// Number of polaron pairs the state was optimized with. After pruning
    /// a channel may hold fewer components.
    pub pairs: usize,
    pub xi_plus: Vec<f64>,
    pub xi_minus: Vec<f64>,
    pub weights_plus: Vec<f64>,
    pub weights_minus: Vec<f64>,
}

impl PolaronAnsatz {
    fn gram(xi: &[f64], w: &[f64], kernel: impl Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (i, (&a, &wa)) in xi.iter().zip(w).enumerate() {
            for (&b, &wb) in xi[..i].iter().zip(w) {
                total += 2.0 * wa * wb * kernel(a, b);
            }
            total += wa * wa * kernel(a, a);
        }
        total
    }

    fn cross(&self, kernel: impl Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (&a, &wa) in self.xi_plus.iter().zip(&self.weights_plus) {
            for (&b, &wb) in self.xi_minus.iter().zip(&self.weights_minus) {
                total += wa * wb * kernel(a, b);
            }
        }
        total
    }

    /// `Σ_s ⟨Ψ^s|K|Ψ^s⟩` for a kernel K, per channel.
    pub(crate) fn channel_expectations(&self, kernel: impl Fn(f64, f64) -> f64 + Copy) -> (f64, f64) {
        (
            Self::gram(&self.xi_plus, &self.weights_plus, kernel),
            Self::gram(&self.xi_minus, &self.weights_minus, kernel),
        )
    }

    /// ½(⟨Ψ⁺|Ψ⁺⟩ + ⟨Ψ⁻|Ψ⁻⟩); equals 1 for a normalized state.
    pub fn norm(&self) -> f64 {
        let (p, m) = self.channel_expectations(overlap_unchecked);
        0.5 * (p + m)
    }

    /// ⟨Ψ⁺|Ψ⁻⟩
    pub fn channel_overlap(&self) -> f64 {
        self.cross(overlap_unchecked)
    }

    /// ⟨G|H|G⟩/⟨G|G⟩ evaluated directly from the kernels.
    pub fn energy(&self, params: &ModelParams) -> f64 {
        let gp = params.gprime();
        let (w, t) = (params.omega(), params.tunneling());
        let (kp, km) = self.channel_expectations(|a, b| overlap_unchecked(a, b) * a * b / (a + b));
        let (xp, xm) = self.channel_expectations(|a, b| overlap_unchecked(a, b) / (a + b));
        let plus = 0.5 * w * ((1.0 - 2.0 * gp) * kp + (1.0 + 2.0 * gp) * xp);
        let minus = 0.5 * w * ((1.0 + 2.0 * gp) * km + (1.0 - 2.0 * gp) * xm);
        let expectation = 0.5 * (plus + minus) - 0.5 * t * self.channel_overlap();
        params.epsilon0() + expectation / self.norm()
    }

    /// Ψ⁺(0), used to fix the global sign.
    fn psi_plus_at_origin(&self) -> f64 {
        self.xi_plus
            .iter()
            .zip(&self.weights_plus)
            .map(|(&xi, &w)| w * (xi / PI).powf(0.25))
            .sum()
    }

    fn flip(&mut self) {
        self.weights_plus.iter_mut().for_each(|w| *w = -*w);
        self.weights_minus.iter_mut().for_each(|w| *w = -*w);
    }
}

/// Builds the (A, B) pair of the fixed-frequency problem.
///
/// `A = [[H⁺, −(Ω/2) S_c], [−(Ω/2) S_cᵀ, H⁻]]`, `B = diag(S⁺, S⁻)`, with
/// `H^±[n,m] = (ω/2)[(1∓2g′) kinetic + (1±2g′) moment_x2]`. The lowest
/// generalized eigenvalue plus ε₀ is the best energy for these frequencies.
pub fn assemble_generalized_problem(
    params: &ModelParams,
    xi_plus: &[f64],
    xi_minus: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if params.beyond_collapse() {
        return Err(Error::CouplingOutOfRange {
            gprime: params.gprime(),
            reason: "no normalizable ground state for |g/omega| > 1/2",
        });
    }
    for &xi in xi_plus.iter().chain(xi_minus) {
        check_xi(xi)?;
    }
    if xi_plus.is_empty() || xi_minus.is_empty() {
        return Err(invalid("each spin channel needs at least one polaron"));
    }
    Ok(assemble_unchecked(params, xi_plus, xi_minus))
}

fn assemble_unchecked(params: &ModelParams, xi_plus: &[f64], xi_minus: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let gp = params.gprime();
    let w = params.omega();
    let half_t = 0.5 * params.tunneling();
    let (np, nm) = (xi_plus.len(), xi_minus.len());
    let dim = np + nm;
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    let block = |a_mat: &mut DMatrix<f64>, b_mat: &mut DMatrix<f64>, xi: &[f64], off: usize, sign: f64| {
        let (kin, pot) = (1.0 - sign * 2.0 * gp, 1.0 + sign * 2.0 * gp);
        for i in 0..xi.len() {
            for j in 0..=i {
                let (p, q) = (xi[i], xi[j]);
                let s = overlap_unchecked(p, q);
                let h = 0.5 * w * (kin * s * p * q / (p + q) + pot * s / (p + q));
                a_mat[(off + i, off + j)] = h;
                a_mat[(off + j, off + i)] = h;
                b_mat[(off + i, off + j)] = s;
                b_mat[(off + j, off + i)] = s;
            }
        }
    };
    block(&mut a, &mut b, xi_plus, 0, 1.0);
    block(&mut a, &mut b, xi_minus, np, -1.0);
    for i in 0..np {
        for j in 0..nm {
            let v = -half_t * overlap_unchecked(xi_plus[i], xi_minus[j]);
            a[(i, np + j)] = v;
            a[(np + j, i)] = v;
        }
    }
    (a, b)
}

/// Relative eigenvalue threshold below which overlap directions are dropped.
pub const OVERLAP_CUTOFF: f64 = 1e-10;

/// Lowest eigenpair of `A c = λ B c` via canonical orthogonalization.
/// The returned vector satisfies `½ cᵀ B c = 1`.
pub fn lowest_generalized_eigenpair(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let eb = SymmetricEigen::new(b.clone());
    let max = eb.eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(invalid("overlap matrix has no positive direction"));
    }
    let keep: Vec<usize> = (0..eb.eigenvalues.len())
        .filter(|&i| eb.eigenvalues[i] > OVERLAP_CUTOFF * max)
        .collect();
    let n = b.nrows();
    let mut x = DMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scale = eb.eigenvalues[i].sqrt().recip();
        x.set_column(col, &(eb.eigenvectors.column(i) * scale));
    }
    let reduced = x.transpose() * a * &x;
    let er = SymmetricEigen::new(reduced);
    let (imin, &lambda) = er
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(q.1))
        .ok_or_else(|| invalid("empty reduced problem"))?;
    if !lambda.is_finite() {
        return Err(Error::NoConvergence("non-finite generalized eigenvalue".into()));
    }
    let c = &x * er.eigenvectors.column(imin) * SQRT_2;
    Ok((lambda, c))
}

/// Optimal weights and energy for fixed frequencies.
pub fn solve_fixed_frequencies(
    params: &ModelParams,
    xi_plus: &[f64],
    xi_minus: &[f64],
) -> Result<(PolaronAnsatz, f64)> {
    let (a, b) = assemble_generalized_problem(params, xi_plus, xi_minus)?;
    let (lambda, c) = lowest_generalized_eigenpair(&a, &b)?;
    let np = xi_plus.len();
    let mut ansatz = PolaronAnsatz {
        pairs: np.max(xi_minus.len()),
        xi_plus: xi_plus.to_vec(),
        xi_minus: xi_minus.to_vec(),
        weights_plus: c.iter().take(np).copied().collect(),
        weights_minus: c.iter().skip(np).copied().collect(),
    };
    if ansatz.psi_plus_at_origin() < 0.0 {
        ansatz.flip();
    }
    Ok((ansatz, params.epsilon0() + lambda))
}

fn energy_at(params: &ModelParams, xi_plus: &[f64], xi_minus: &[f64]) -> f64 {
    let (a, b) = assemble_unchecked(params, xi_plus, xi_minus);
    match lowest_generalized_eigenpair(&a, &b) {
        Ok((lambda, _)) => params.epsilon0() + lambda,
        Err(_) => f64::INFINITY,
    }
}

/// Search settings for [`minimize_energy`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalConfig {
    /// Convergence tolerance on the energy, in units of ω.
    pub tol: f64,
    /// Number of simplex starts per stage (the first is deterministic).
    pub starts: usize,
    pub seed: u64,
    /// Evaluation budget of a single simplex run.
    pub max_evaluations: usize,
    /// Simplex restarts from the incumbent before giving up.
    pub max_restarts: usize,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            starts: 8,
            seed: 0,
            max_evaluations: 20_000,
            max_restarts: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub pairs: usize,
    pub start: usize,
    pub restart: usize,
    pub evaluations: usize,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub params: ModelParams,
    pub ansatz: PolaronAnsatz,
    pub energy: f64,
    pub optimizer_trace: Vec<TraceEntry>,
    pub converged: bool,
}

/// Frequencies are kept inside this range during the search.
const XI_SEARCH_RANGE: (f64, f64) = (1e-6, 1e6);
/// Initial guesses are clamped to this range (the bare ξ⁻ vanishes at g′ = 1/2).
const XI_INIT_RANGE: (f64, f64) = (1e-3, 1e3);
/// Components whose weight times largest overlap falls below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-8;

fn clamp_init(xi: f64) -> f64 {
    if xi.is_nan() {
        return 1.0;
    }
    xi.clamp(XI_INIT_RANGE.0, XI_INIT_RANGE.1)
}

fn bare_guess(gprime: f64) -> (f64, f64) {
    match bare_frequencies(gprime) {
        Some((p, m)) => (clamp_init(p), clamp_init(m)),
        None => (XI_INIT_RANGE.1, XI_INIT_RANGE.0),
    }
}

/// Adds `extra` frequencies to a channel: the exchange partner first, then
/// geometric means across the widest gap in log ξ.
fn extend_channel(existing: &[f64], exchange: f64, extra: usize) -> Vec<f64> {
    let mut out = existing.to_vec();
    for k in 0..extra {
        let candidate = if k == 0 && !out.iter().any(|&v| (v / exchange).ln().abs() < 1e-6) {
            exchange
        } else {
            let mut sorted = out.clone();
            sorted.sort_by(f64::total_cmp);
            let widest = sorted
                .windows(2)
                .max_by(|a, b| (a[1] / a[0]).total_cmp(&(b[1] / b[0])))
                .map(|w| (w[0] * w[1]).sqrt());
            match widest {
                Some(mid) if sorted.len() > 1 && sorted[sorted.len() - 1] / sorted[0] > 1.0 + 1e-6 => mid,
                _ => sorted[0] * 2.0,
            }
        };
        out.push(clamp_init(candidate));
    }
    out
}

fn to_logs(xi_plus: &[f64], xi_minus: &[f64]) -> Vec<f64> {
    xi_plus.iter().chain(xi_minus).map(|v| v.ln()).collect()
}

fn from_logs(t: &[f64], np: usize) -> (Vec<f64>, Vec<f64>) {
    let xi: Vec<f64> = t
        .iter()
        .map(|v| v.exp().clamp(XI_SEARCH_RANGE.0, XI_SEARCH_RANGE.1))
        .collect();
    (xi[..np].to_vec(), xi[np..].to_vec())
}

struct StartOutcome {
    start: usize,
    logs: Vec<f64>,
    energy: f64,
    converged: bool,
    trace: Vec<TraceEntry>,
}

fn run_start(
    params: &ModelParams,
    pairs: usize,
    np: usize,
    start: usize,
    x0: Vec<f64>,
    config: &VariationalConfig,
) -> StartOutcome {
    let tol = config.tol * params.omega();
    let objective = |t: &[f64]| {
        let (p, m) = from_logs(t, np);
        energy_at(params, &p, &m)
    };
    let mut logs = x0;
    let mut energy = objective(&logs);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut step = 0.3;
    for restart in 0..=config.max_restarts {
        let nm = NelderMead {
            initial_step: step,
            f_tol: 0.1 * tol,
            x_tol: 1e-7,
            max_evaluations: config.max_evaluations,
        };
        let found = nm.minimize(objective, &logs);
        let improvement = energy - found.value;
        if found.value < energy {
            energy = found.value;
            logs = found.x;
        }
        trace.push(TraceEntry {
            pairs,
            start,
            restart,
            evaluations: found.evaluations,
            energy,
        });
        if found.converged && improvement.abs() < tol {
            converged = true;
            break;
        }
        step = (step * 0.5).max(0.02);
    }
    StartOutcome {
        start,
        logs,
        energy,
        converged,
        trace,
    }
}

fn prune(params: &ModelParams, ansatz: PolaronAnsatz, energy: f64) -> Result<(PolaronAnsatz, f64)> {
    let significant = |xi: &[f64], w: &[f64]| -> Vec<bool> {
        xi.iter()
            .zip(w)
            .map(|(&a, &wa)| {
                let largest = xi.iter().map(|&b| overlap_unchecked(a, b)).fold(0.0, f64::max);
                wa.abs() * largest >= PRUNE_THRESHOLD
            })
            .collect()
    };
    let keep_p = significant(&ansatz.xi_plus, &ansatz.weights_plus);
    let keep_m = significant(&ansatz.xi_minus, &ansatz.weights_minus);
    if keep_p.iter().all(|&k| k) && keep_m.iter().all(|&k| k) {
        return Ok((ansatz, energy));
    }
    let select = |xi: &[f64], keep: &[bool]| -> Vec<f64> {
        let kept: Vec<f64> = xi.iter().zip(keep).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
        if kept.is_empty() {
            vec![xi[0]]
        } else {
            kept
        }
    };
    let xp = select(&ansatz.xi_plus, &keep_p);
    let xm = select(&ansatz.xi_minus, &keep_m);
    let (mut pruned, e) = solve_fixed_frequencies(params, &xp, &xm)?;
    pruned.pairs = ansatz.pairs;
    Ok((pruned, e))
}

fn effective_components(ansatz: &PolaronAnsatz) -> usize {
    ansatz.xi_plus.len() + ansatz.xi_minus.len()
}

fn check_range(params: &ModelParams) -> Result<()> {
    if params.beyond_collapse() {
        return Err(Error::CouplingOutOfRange {
            gprime: params.gprime(),
            reason: "no normalizable ground state for |g/omega| > 1/2",
        });
    }
    Ok(())
}

/// One stage of the search: `pairs` polaron pairs, optionally seeded with a
/// solution using fewer pairs (its energy is then an upper bound).
pub fn minimize_stage(
    params: &ModelParams,
    pairs: usize,
    config: &VariationalConfig,
    seed_solution: Option<&PolaronAnsatz>,
) -> Result<VariationalSolution> {
    check_range(params)?;
    if pairs == 0 {
        return Err(invalid("at least one polaron pair is required"));
    }
    if config.starts == 0 {
        return Err(invalid("at least one start is required"));
    }
    let (bp, bm) = bare_guess(params.gprime());
    let fresh_p = extend_channel(&[bp], bm, pairs - 1);
    let fresh_m = extend_channel(&[bm], bp, pairs - 1);
    let (seed_p, seed_m) = match seed_solution {
        Some(s) if s.xi_plus.len() <= pairs && s.xi_minus.len() <= pairs => {
            let exch_p = s.xi_minus.first().copied().unwrap_or(bm);
            let exch_m = s.xi_plus.first().copied().unwrap_or(bp);
            (
                extend_channel(&s.xi_plus, exch_p, pairs - s.xi_plus.len()),
                extend_channel(&s.xi_minus, exch_m, pairs - s.xi_minus.len()),
            )
        }
        _ => (fresh_p.clone(), fresh_m.clone()),
    };

    let base = to_logs(&seed_p, &seed_m);
    let mut inits = vec![base.clone()];
    if config.starts > 1 {
        inits.push(to_logs(&fresh_p, &fresh_m));
    }
    let noise = Normal::new(0.0, 0.5).expect("valid normal");
    for start in inits.len()..config.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(((pairs as u64) << 32) | start as u64);
        inits.push(base.iter().map(|v| v + noise.sample(&mut rng)).collect());
    }

    let np = pairs;
    let outcomes: Vec<StartOutcome> = inits
        .into_par_iter()
        .enumerate()
        .map(|(start, x0)| run_start(params, pairs, np, start, x0, config))
        .collect();

    let tol = config.tol * params.omega();
    let mut candidates = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        if !o.energy.is_finite() {
            continue;
        }
        let (p, m) = from_logs(&o.logs, np);
        let (ansatz, energy) = solve_fixed_frequencies(params, &p, &m)?;
        let (ansatz, energy) = prune(params, ansatz, energy)?;
        candidates.push((energy, effective_components(&ansatz), o.start, ansatz, o.converged));
    }
    let best_energy = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let (energy, _, _, mut ansatz, converged) = candidates
        .into_iter()
        .filter(|c| c.0 <= best_energy + tol)
        .min_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)))
        .ok_or_else(|| Error::NoConvergence("every start failed".into()))?;
    ansatz.pairs = pairs;
    Ok(VariationalSolution {
        params: *params,
        ansatz,
        energy,
        optimizer_trace: outcomes.into_iter().flat_map(|o| o.trace).collect(),
        converged,
    })
}

/// Solutions for 1..=max_pairs pairs, each stage seeded from the previous
/// one so the energies are nonincreasing.
pub fn minimize_ladder(
    params: &ModelParams,
    max_pairs: usize,
    config: &VariationalConfig,
) -> Result<Vec<VariationalSolution>> {
    let mut out: Vec<VariationalSolution> = Vec::with_capacity(max_pairs);
    for pairs in 1..=max_pairs {
        let seed = out.last().map(|s| &s.ansatz);
        let mut sol = minimize_stage(params, pairs, config, seed)?;
        if let Some(prev) = out.last() {
            // the seeded start contains the previous optimum, so only round-off
            // can push above it
            if sol.energy > prev.energy {
                sol.energy = sol.energy.min(prev.energy);
            }
        }
        out.push(sol);
    }
    Ok(out)
}

/// Variational ground state with `pairs` polaron pairs.
pub fn minimize_energy(params: &ModelParams, pairs: usize, config: &VariationalConfig) -> Result<VariationalSolution> {
    let mut ladder = minimize_ladder(params, pairs, config)?;
    Ok(ladder.pop().expect("pairs >= 1"))
}

/// The fixed bare state (one Gaussian per channel at the Ω = 0 frequencies)
/// with weights re-optimized for the given tunneling. Defined for |g′| < 1/2.
pub fn bare_state(params: &ModelParams) -> Result<VariationalSolution> {
    let (p, m) = bare_frequencies(params.gprime()).ok_or(Error::CouplingOutOfRange {
        gprime: params.gprime(),
        reason: "bare spin-up frequency diverges at |g/omega| >= 1/2",
    })?;
    let ansatz = PolaronAnsatz {
        pairs: 1,
        xi_plus: vec![p],
        xi_minus: vec![m],
        weights_plus: vec![1.0],
        weights_minus: vec![1.0],
    };
    let energy = ansatz.energy(params);
    Ok(VariationalSolution {
        params: *params,
        ansatz,
        energy,
        optimizer_trace: Vec::new(),
        converged: true,
    })
}

/// Per-component curves `α_n φ(ξ⁺_n, x)` and `β_n φ(ξ⁻_n, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolaronComponents {
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

pub fn ansatz_components(ansatz: &PolaronAnsatz, grid: &Grid) -> PolaronComponents {
    let curves = |xi: &[f64], w: &[f64]| -> Vec<Vec<f64>> {
        xi.iter()
            .zip(w)
            .map(|(&a, &wa)| (0..grid.len()).map(|i| wa * gaussian(a, grid.x(i))).collect())
            .collect()
    };
    PolaronComponents {
        plus: curves(&ansatz.xi_plus, &ansatz.weights_plus),
        minus: curves(&ansatz.xi_minus, &ansatz.weights_minus),
    }
}

/// Ψ±(x) of a variational solution sampled on a grid.
pub fn ansatz_to_grid(solution: &VariationalSolution, grid: &Grid) -> Result<SpinorWavefunction> {
    let parts = ansatz_components(&solution.ansatz, grid);
    let sum =
        |curves: &[Vec<f64>]| -> Vec<f64> { (0..grid.len()).map(|i| curves.iter().map(|c| c[i]).sum()).collect() };
    SpinorWavefunction::new(*grid, sum(&parts.plus), sum(&parts.minus))
}
