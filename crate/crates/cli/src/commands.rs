//! One function per subcommand. Each computes its points in parallel, then
//! writes tables and the manifest from the calling thread.

use std::path::PathBuf;

use anyhow::{bail, ensure, Result};
use rabi2_core::exact::{
    classify_convergence, ground_state, scan_coupling, scan_cutoff_with, scan_tunneling_at_collapse, FockState,
    LevelKind, ScanOptions,
};
use rabi2_core::grid::{fock_to_grid, Grid, SpinorWavefunction};
use rabi2_core::model::bare_state_energy;
use rabi2_core::observables::{GroundStateHandle, Observables};
use rabi2_core::polaron::{
    ansatz_components, ansatz_to_grid, bare_state, minimize_ladder, VariationalConfig, VariationalSolution,
};
use rabi2_core::potential::{barrier_profile_beyond_collapse, potential_curves};
use rabi2_core::{CutoffConvention, FockBasisSpec, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{Cell, Run, Table};
use crate::{
    CollapseVsOmega, Common, CouplingRange, CutoffScan, EnergyScan, Method, ObservablesScan, PolaronConvergence,
    Potential, SpectrumScan, WaveMethod, Wavefunction,
};

const N_MAX_CONVENTION: &str = "n_max = largest photon number kept per spin (n = 0..=n_max)";
const ENERGY: &str = "energy, units of omega input";
const LENGTH: &str = "oscillator length";
const WAVE: &str = "oscillator length^-1/2";
const POTENTIAL: &str = "omega (1 -+ 2g/omega)/2";

pub struct Report {
    pub dir: PathBuf,
    pub untrusted: usize,
}

fn start<A: Serialize>(common: &Common, subcommand: &str, args: &A) -> Result<Run> {
    let parameters = serde_json::json!({ "common": common, "subcommand": args });
    Run::create(&common.out_dir, subcommand, parameters, common.format, common.gnuplot)
}

fn finish(run: Run, convention: &str, common: &Common) -> Result<Report> {
    let (dir, untrusted) = run.finish(convention, common.seed)?;
    Ok(Report { dir, untrusted })
}

fn variational_config(common: &Common) -> VariationalConfig {
    VariationalConfig {
        seed: common.seed,
        ..VariationalConfig::default()
    }
}

fn model_notes(omega: f64, tunneling: f64, n_max: Option<usize>) -> Vec<String> {
    let mut notes = vec![format!("omega = {omega}, Omega = {tunneling}")];
    if let Some(n) = n_max {
        notes.push(format!("exact diagonalization: {N_MAX_CONVENTION}, n_max = {n}"));
    }
    notes
}

/// Evenly spaced values from `lo` to `hi` inclusive; a single step gives `lo`.
fn linspace(lo: f64, hi: f64, steps: usize, what: &str) -> Result<Vec<f64>> {
    ensure!(steps >= 1, "{what}: at least one step is required");
    ensure!(lo.is_finite() && hi.is_finite(), "{what}: bounds must be finite");
    ensure!(lo <= hi, "{what}: lower bound {lo} exceeds upper bound {hi}");
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last
            }
        })
        .collect())
}

fn couplings(range: &CouplingRange) -> Result<Vec<f64>> {
    linspace(range.g_min, range.g_max, range.g_steps, "coupling range")
}

fn require_variational_range(omega: f64, couplings: &[f64]) -> Result<()> {
    if let Some(g) = couplings.iter().find(|g| g.abs() / omega > 0.5) {
        bail!(
            "variational methods need |g|/omega <= 1/2, got g = {g} (g/omega = {})",
            g / omega
        );
    }
    Ok(())
}

fn max_pairs(methods: &[Method]) -> Option<usize> {
    methods
        .iter()
        .filter_map(|m| match m {
            Method::Polaron(n) => Some(*n),
            _ => None,
        })
        .max()
}

fn method_label(m: Method) -> String {
    match m {
        Method::Bare => "bare".into(),
        Method::Ed => "ED".into(),
        Method::Polaron(n) => format!("N{n}"),
    }
}

fn exact_ground_state(params: &ModelParams, n_max: usize) -> Result<(FockState, bool)> {
    let state = ground_state(params, &FockBasisSpec::full(n_max)?)?;
    let untrusted = params.beyond_collapse() || state.truncation_suspect();
    Ok((state, untrusted))
}

fn check_methods(omega: f64, methods: &[Method], gs: &[f64]) -> Result<()> {
    ensure!(!methods.is_empty(), "--methods must name at least one method");
    if methods.iter().any(|m| *m != Method::Ed) {
        require_variational_range(omega, gs)?;
    }
    Ok(())
}

pub fn energy_scan(common: &Common, args: &EnergyScan) -> Result<Report> {
    let gs = couplings(&args.range)?;
    check_methods(common.omega, &args.methods, &gs)?;
    let base = ModelParams::new(common.omega, args.tunneling, 0.0)?;
    let config = variational_config(common);
    let pairs = max_pairs(&args.methods);

    let rows = gs
        .par_iter()
        .map(|&g| -> Result<(Vec<Cell>, bool)> {
            let p = base.with_coupling(g)?;
            let ladder = match pairs {
                Some(n) => minimize_ladder(&p, n, &config)?,
                None => Vec::new(),
            };
            let mut untrusted = false;
            let mut row = vec![Cell::Num(p.gprime())];
            for &m in &args.methods {
                let e = match m {
                    Method::Bare => bare_state_energy(&p)?,
                    Method::Polaron(n) => {
                        untrusted |= !ladder[n - 1].converged;
                        ladder[n - 1].energy
                    }
                    Method::Ed => {
                        let (state, flag) = exact_ground_state(&p, common.n_max)?;
                        untrusted |= flag;
                        state.energy
                    }
                };
                row.push(Cell::Num(e));
            }
            row.push(Cell::Flag(untrusted));
            Ok((row, untrusted))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new().column("g_over_omega", "1");
    for &m in &args.methods {
        table = table.plotted(format!("E_{}", method_label(m)), ENERGY);
    }
    table = table.column("untrusted", "flag");
    let mut run = start(common, "energy-scan", args)?;
    for (row, flag) in rows {
        run.flag_untrusted(usize::from(flag));
        table.push(row);
    }
    run.table(
        "energy",
        &table,
        &model_notes(common.omega, args.tunneling, Some(common.n_max)),
    )?;
    finish(run, N_MAX_CONVENTION, common)
}

pub fn observables_scan(common: &Common, args: &ObservablesScan) -> Result<Report> {
    let gs = couplings(&args.range)?;
    check_methods(common.omega, &args.methods, &gs)?;
    let base = ModelParams::new(common.omega, args.tunneling, 0.0)?;
    let config = variational_config(common);
    let pairs = max_pairs(&args.methods);

    let rows =
        gs.par_iter()
            .map(|&g| -> Result<(Vec<Cell>, bool)> {
                let p = base.with_coupling(g)?;
                let ladder = match pairs {
                    Some(n) => minimize_ladder(&p, n, &config)?,
                    None => Vec::new(),
                };
                let mut untrusted = false;
                let mut row = vec![Cell::Num(p.gprime())];
                for &m in &args.methods {
                    let handle = match m {
                        // the bare polaron degenerates at the collapse point
                        Method::Bare if p.at_collapse() => None,
                        Method::Bare => Some(GroundStateHandle::polaron(bare_state(&p)?)),
                        Method::Polaron(n) => {
                            untrusted |= !ladder[n - 1].converged;
                            Some(GroundStateHandle::polaron(ladder[n - 1].clone()))
                        }
                        Method::Ed => {
                            let (state, flag) = exact_ground_state(&p, common.n_max)?;
                            untrusted |= flag;
                            Some(GroundStateHandle::fock(p, state))
                        }
                    };
                    match handle.map(|h| Observables::of(&h)) {
                        Some(o) => row
                            .extend([o.energy, o.sigma_x, o.mean_photon_number, o.coupling_correlation].map(Cell::Num)),
                        None => row.extend([f64::NAN; 4].map(Cell::Num)),
                    }
                }
                row.push(Cell::Flag(untrusted));
                Ok((row, untrusted))
            })
            .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new().column("g_over_omega", "1");
    for &m in &args.methods {
        let l = method_label(m);
        table = table
            .column(format!("E_{l}"), ENERGY)
            .plotted(format!("sigma_x_{l}"), "1")
            .plotted(format!("photons_{l}"), "1")
            .plotted(format!("correlation_{l}"), "1");
    }
    table = table.column("untrusted", "flag");
    let mut run = start(common, "observables-scan", args)?;
    for (row, flag) in rows {
        run.flag_untrusted(usize::from(flag));
        table.push(row);
    }
    let mut notes = model_notes(common.omega, args.tunneling, Some(common.n_max));
    notes.push("sigma_x = <sigma_x>, photons = <a+a>, correlation = <sigma_z (a+^2 + a^2)>".into());
    if args.methods.contains(&Method::Bare) {
        notes.push("bare columns are nan at g/omega = 1/2, where the bare polaron is not normalizable".into());
    }
    run.table("observables", &table, &notes)?;
    finish(run, N_MAX_CONVENTION, common)
}

#[derive(Serialize)]
struct WavefunctionSummary {
    method: WaveMethod,
    energy: f64,
    norm: f64,
    truncation_suspect: bool,
    untrusted: bool,
}

fn wave_table(wf: &SpinorWavefunction) -> Table {
    let mut table = Table::new()
        .column("x", LENGTH)
        .plotted("psi_plus", WAVE)
        .plotted("psi_minus", WAVE);
    for i in 0..wf.grid.len() {
        table.push(vec![wf.grid.x(i).into(), wf.psi_plus[i].into(), wf.psi_minus[i].into()]);
    }
    table
}

pub fn wavefunction(common: &Common, args: &Wavefunction) -> Result<Report> {
    let p = ModelParams::new(common.omega, args.tunneling, args.g)?;
    let grid = Grid::new(args.x_max, args.points)?;
    let mut notes = model_notes(common.omega, args.tunneling, None);
    notes.push(format!("g = {} (g/omega = {})", args.g, p.gprime()));
    notes.push("spinor convention: |G> = (psi_plus |up> - psi_minus |down>)/sqrt(2), psi_plus(0) >= 0".into());

    match args.method {
        WaveMethod::Ed => {
            ensure!(!args.decompose, "--decompose needs --method polaron");
            let (state, flag) = exact_ground_state(&p, common.n_max)?;
            let wf = fock_to_grid(&state, &grid)?;
            let untrusted = flag || wf.truncation_suspect;
            notes.push(format!(
                "exact diagonalization: {N_MAX_CONVENTION}, n_max = {}",
                common.n_max
            ));
            let mut run = start(common, "wavefunction", args)?;
            run.flag_untrusted(usize::from(untrusted));
            run.table("wavefunction", &wave_table(&wf), &notes)?;
            run.json(
                "summary",
                &WavefunctionSummary {
                    method: args.method,
                    energy: state.energy,
                    norm: wf.norm(),
                    truncation_suspect: wf.truncation_suspect,
                    untrusted,
                },
            )?;
            finish(run, N_MAX_CONVENTION, common)
        }
        WaveMethod::Polaron => {
            ensure!(args.pairs >= 1, "--N must be at least 1");
            require_variational_range(common.omega, &[args.g])?;
            let ladder = minimize_ladder(&p, args.pairs, &variational_config(common))?;
            let solution = &ladder[args.pairs - 1];
            let wf = ansatz_to_grid(solution, &grid)?;
            let untrusted = !solution.converged;
            notes.push(format!("polaron pairs N = {}", args.pairs));
            let mut table = wave_table(&wf);
            if args.decompose {
                // same sign convention as the summed spinor
                let parts = ansatz_components(&solution.ansatz, &grid);
                let raw_center: f64 = parts.plus.iter().map(|c| c[grid.center()]).sum();
                let sign = if raw_center < 0.0 { -1.0 } else { 1.0 };
                for (k, _) in parts.plus.iter().enumerate() {
                    table = table.plotted(format!("plus_{}", k + 1), WAVE);
                }
                for (k, _) in parts.minus.iter().enumerate() {
                    table = table.plotted(format!("minus_{}", k + 1), WAVE);
                }
                for (i, row) in table.rows.iter_mut().enumerate() {
                    row.extend(parts.plus.iter().map(|c| Cell::Num(sign * c[i])));
                    row.extend(parts.minus.iter().map(|c| Cell::Num(sign * c[i])));
                }
                notes.push("plus_k / minus_k: weighted Gaussian components summing to psi_plus / psi_minus".into());
            }
            let mut run = start(common, "wavefunction", args)?;
            run.flag_untrusted(usize::from(untrusted));
            run.table("wavefunction", &table, &notes)?;
            run.json(
                "summary",
                &WavefunctionSummary {
                    method: args.method,
                    energy: solution.energy,
                    norm: wf.norm(),
                    truncation_suspect: false,
                    untrusted,
                },
            )?;
            run.json("solution", solution)?;
            finish(run, N_MAX_CONVENTION, common)
        }
    }
}

pub fn polaron_convergence(common: &Common, args: &PolaronConvergence) -> Result<Report> {
    ensure!(args.max_pairs >= 1, "--N-max must be at least 1");
    let p = ModelParams::new(common.omega, args.tunneling, args.g)?;
    require_variational_range(common.omega, &[args.g])?;
    let ladder: Vec<VariationalSolution> = minimize_ladder(&p, args.max_pairs, &variational_config(common))?;
    let (state, ed_flag) = exact_ground_state(&p, common.n_max)?;
    let reference = state.energy;

    let mut table = Table::new()
        .column("N", "pairs")
        .column("E_N", ENERGY)
        .column("E_ED", ENERGY)
        .plotted("relative_error", "1")
        .column("converged", "flag");
    let mut run = start(common, "polaron-convergence", args)?;
    run.flag_untrusted(usize::from(ed_flag));
    for (k, s) in ladder.iter().enumerate() {
        run.flag_untrusted(usize::from(!s.converged));
        table.push(vec![
            (k + 1).into(),
            s.energy.into(),
            reference.into(),
            ((s.energy - reference) / reference.abs()).into(),
            s.converged.into(),
        ]);
    }
    let mut notes = model_notes(common.omega, args.tunneling, Some(common.n_max));
    notes.push(format!("g = {} (g/omega = {})", args.g, p.gprime()));
    notes.push("relative_error = (E_N - E_ED)/|E_ED|".into());
    run.table("convergence", &table, &notes)?;
    run.json("solutions", &ladder)?;
    finish(run, N_MAX_CONVENTION, common)
}

fn kind_label(kind: Option<LevelKind>) -> &'static str {
    match kind {
        Some(LevelKind::Discrete) => "discrete",
        Some(LevelKind::Collapsed) => "collapsed",
        None => "unclassified",
    }
}

pub fn spectrum_scan(common: &Common, args: &SpectrumScan) -> Result<Report> {
    ensure!(args.levels >= 1, "--levels must be at least 1");
    let gs = couplings(&args.range)?;
    let base = ModelParams::new(common.omega, args.tunneling, 0.0)?;
    let options = ScanOptions {
        allow_beyond_collapse: true,
        delta: args.delta,
    };
    let rows = scan_coupling(&base, &gs, common.n_max, args.levels, &options)?;

    let mut table = Table::new()
        .column("g_over_omega", "1")
        .column("level", "index")
        .plotted("E", ENERGY)
        .column("kind", "label")
        .column("untrusted", "flag");
    let mut run = start(common, "spectrum-scan", args)?;
    for row in &rows {
        run.flag_untrusted(usize::from(row.untrusted));
        for (i, &e) in row.levels.iter().enumerate() {
            let kind = row.kinds.as_ref().map(|k| k[i]);
            table.push(vec![
                row.gprime.into(),
                i.into(),
                e.into(),
                kind_label(kind).into(),
                row.untrusted.into(),
            ]);
        }
    }
    let mut notes = model_notes(common.omega, args.tunneling, Some(common.n_max));
    notes.push(format!(
        "kind: levels at g/omega = 1/2 below -omega/2 - delta*omega are discrete, delta = {}",
        args.delta
    ));
    notes.push("untrusted: g/omega > 1/2, where finite-cutoff levels are truncation artifacts".into());
    run.table("spectrum", &table, &notes)?;
    finish(run, N_MAX_CONVENTION, common)
}

#[derive(Serialize)]
struct CollapseReport {
    /// E0/ω = slope·(Ω/ω) + intercept
    ground_fit: Option<rabi2_core::exact::LinearFit>,
    /// (E1 − E0)/ω at the largest Ω
    gap_at_largest_tunneling: Option<f64>,
    largest_tunneling_over_omega: f64,
}

pub fn collapse_vs_omega(common: &Common, args: &CollapseVsOmega) -> Result<Report> {
    ensure!(args.levels >= 1, "--levels must be at least 1");
    ensure!(args.tunneling_min >= 0.0, "--Omega-min must be non-negative");
    let tunneling = linspace(
        args.tunneling_min,
        args.tunneling_max,
        args.tunneling_steps,
        "tunneling range",
    )?;
    let scan = scan_tunneling_at_collapse(common.omega, &tunneling, common.n_max, args.levels, args.delta)?;
    let w = scan.omega;

    let mut table = Table::new()
        .column("Omega_over_omega", "1")
        .column("discrete_count", "levels");
    for i in 0..args.levels {
        table = table.plotted(format!("E{i}_over_omega"), "1");
    }
    for row in &scan.rows {
        let mut cells = vec![row.tunneling_ratio.into(), row.discrete_count.into()];
        cells.extend((0..args.levels).map(|i| Cell::Num(row.levels.get(i).map_or(f64::NAN, |e| e / w))));
        table.push(cells);
    }
    let last = scan.rows.last().expect("at least one tunneling value");
    let report = CollapseReport {
        ground_fit: scan.ground_fit,
        gap_at_largest_tunneling: (last.levels.len() >= 2).then(|| (last.levels[1] - last.levels[0]) / w),
        largest_tunneling_over_omega: last.tunneling_ratio,
    };
    if let Some(fit) = &report.ground_fit {
        println!(
            "E0/omega = {} * Omega/omega + {}  (R^2 = {})",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    let mut notes = vec![format!("omega = {}, g = omega/2", common.omega)];
    notes.push(format!(
        "exact diagonalization: {N_MAX_CONVENTION}, n_max = {}",
        common.n_max
    ));
    notes.push(format!(
        "discrete_count: levels below -omega/2 - delta*omega, delta = {}",
        args.delta
    ));
    let mut run = start(common, "collapse-vs-Omega", args)?;
    run.table("collapse", &table, &notes)?;
    run.json("fit", &report)?;
    finish(run, N_MAX_CONVENTION, common)
}

#[derive(Serialize)]
struct CutoffReport {
    convention: CutoffConvention,
    convention_description: &'static str,
    classification: Option<rabi2_core::exact::Convergence>,
    plateau_tol: f64,
    drop_tol: f64,
    untrusted: bool,
}

pub fn cutoff_scan(common: &Common, args: &CutoffScan) -> Result<Report> {
    let p = ModelParams::new(common.omega, args.tunneling, args.g)?;
    let convention: CutoffConvention = args.cutoff_convention.into();
    let scan = scan_cutoff_with(&p, &args.cutoffs, convention)?;
    let classification = if scan.rows.len() >= 3 {
        Some(classify_convergence(&scan, args.plateau_tol, args.drop_tol)?)
    } else {
        None
    };

    let mut table = Table::new()
        .column("cutoff", "states")
        .column("n_max", "photons")
        .plotted("E0_over_omega", "1")
        .plotted("E1_over_omega", "1");
    for row in &scan.rows {
        let n_max = convention.n_max(row.cutoff).expect("validated by the scan");
        table.push(vec![row.cutoff.into(), n_max.into(), row.e0.into(), row.e1.into()]);
    }
    let mut run = start(common, "cutoff-scan", args)?;
    if scan.untrusted {
        run.flag_untrusted(scan.rows.len());
    }
    let mut notes = model_notes(common.omega, args.tunneling, None);
    notes.push(format!("g = {} (g/omega = {})", args.g, p.gprime()));
    notes.push(format!("cutoff convention: {}", convention.describe()));
    if scan.untrusted {
        notes.push("untrusted: g/omega > 1/2, the spectrum is unbounded below as the cutoff grows".into());
    }
    run.table("cutoff", &table, &notes)?;
    run.json(
        "classification",
        &CutoffReport {
            convention,
            convention_description: convention.describe(),
            classification,
            plateau_tol: args.plateau_tol,
            drop_tol: args.drop_tol,
            untrusted: scan.untrusted,
        },
    )?;
    if let Some(c) = classification {
        println!(
            "classification: {}",
            serde_json::to_value(c)?.as_str().unwrap_or_default()
        );
    }
    finish(run, convention.describe(), common)
}

#[derive(Serialize)]
struct PotentialSummary {
    energy: f64,
    /// −δv⁻(0)
    well_depth: Option<f64>,
    local_minima_minus: Vec<f64>,
    sign_change: bool,
    untrusted: bool,
}

pub fn potential(common: &Common, args: &Potential) -> Result<Report> {
    let p = ModelParams::new(common.omega, args.tunneling, args.g)?;
    let grid = Grid::new(args.x_max, args.points)?;
    let (wf, energy, flag) = match args.method {
        WaveMethod::Ed => {
            let (state, flag) = exact_ground_state(&p, common.n_max)?;
            let wf = fock_to_grid(&state, &grid)?;
            (wf, state.energy, flag)
        }
        WaveMethod::Polaron => {
            ensure!(args.pairs >= 1, "--N must be at least 1");
            require_variational_range(common.omega, &[args.g])?;
            let ladder = minimize_ladder(&p, args.pairs, &variational_config(common))?;
            let s = &ladder[args.pairs - 1];
            (ansatz_to_grid(s, &grid)?, s.energy, !s.converged)
        }
    };
    let curves = if p.beyond_collapse() {
        barrier_profile_beyond_collapse(&p, &wf)?
    } else {
        potential_curves(&p, &wf)
    };
    let untrusted = flag || curves.untrusted;
    if curves.sign_change {
        eprintln!("warning: a spinor component changes sign; the induced potential is not a well there");
    }

    let mut table = Table::new()
        .column("x", LENGTH)
        .plotted("v_plus", POTENTIAL)
        .plotted("v_minus", POTENTIAL)
        .plotted("dv_plus", POTENTIAL)
        .plotted("dv_minus", POTENTIAL)
        .plotted("veff_plus", POTENTIAL)
        .plotted("veff_minus", POTENTIAL)
        .column("mask_plus", "flag")
        .column("mask_minus", "flag");
    for i in 0..grid.len() {
        table.push(vec![
            grid.x(i).into(),
            curves.v_plus[i].into(),
            curves.v_minus[i].into(),
            curves.dv_plus[i].into(),
            curves.dv_minus[i].into(),
            curves.veff_plus[i].into(),
            curves.veff_minus[i].into(),
            curves.mask_plus[i].into(),
            curves.mask_minus[i].into(),
        ]);
    }
    let mut notes = model_notes(common.omega, args.tunneling, None);
    notes.push(format!("g = {} (g/omega = {})", args.g, p.gprime()));
    if args.method == WaveMethod::Ed {
        notes.push(format!(
            "exact diagonalization: {N_MAX_CONVENTION}, n_max = {}",
            common.n_max
        ));
    }
    notes.push("channel equation: (omega/2)(1 -+ 2g/omega)(-psi'' + veff psi) = (E - eps0) psi".into());
    notes.push("mask = 1 where the channel amplitude exceeds 1e-8 of its maximum; nan elsewhere".into());
    if p.beyond_collapse() {
        notes.push("g/omega > 1/2: barrier profile of a finite-cutoff state, untrusted".into());
    }
    let mut run = start(common, "potential", args)?;
    run.flag_untrusted(usize::from(untrusted));
    run.table("potential", &table, &notes)?;
    run.json(
        "summary",
        &PotentialSummary {
            energy,
            well_depth: curves.well_depth(),
            local_minima_minus: curves.local_minima_minus(),
            sign_change: curves.sign_change,
            untrusted,
        },
    )?;
    finish(run, N_MAX_CONVENTION, common)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 0.5, 1, "r").unwrap(), vec![0.0]);
        let v = linspace(0.0, 0.5, 51, "r").unwrap();
        assert_eq!(v.len(), 51);
        assert_eq!(v[50], 0.5);
        assert!(linspace(1.0, 0.0, 3, "r").is_err());
        assert!(linspace(0.0, 1.0, 0, "r").is_err());
    }

    #[test]
    fn variational_range_is_checked() {
        assert!(require_variational_range(1.0, &[0.0, 0.5]).is_ok());
        assert!(require_variational_range(1.0, &[0.51]).is_err());
        assert!(require_variational_range(2.0, &[-1.0]).is_ok());
    }
}
