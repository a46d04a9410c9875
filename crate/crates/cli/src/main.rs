//! `rabi2`: scan tables for the two-photon quantum Rabi model.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi2_core::CutoffConvention;
use serde::{Serialize, Serializer};

use crate::output::Format;

/// Exit status when results were written but some points are untrusted.
const EXIT_UNTRUSTED: u8 = 3;

#[derive(Parser, Debug)]
#[command(author, version, about = "Ground states, spectra and potentials of the two-photon quantum Rabi model", long_about = None)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Boson frequency ω (sets the energy unit of every output)
    #[arg(long, global = true, default_value_t = 1.0)]
    omega: f64,
    /// Largest photon number kept per spin in exact diagonalization
    #[arg(long, global = true, default_value_t = 1599)]
    n_max: usize,
    /// Seed for the randomized variational starts
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Root directory; each run writes into its own subdirectory
    #[arg(long, global = true, env = "RABI2_OUT", default_value = "rabi2-out")]
    #[serde(skip)]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Exit with status 0 even if some points are flagged untrusted
    #[arg(long, global = true)]
    allow_untrusted: bool,
    /// Also write a gnuplot script next to each CSV table
    #[arg(long, global = true)]
    gnuplot: bool,
}

/// A ground-state method: `bare`, `ed`, or `n<N>` for N polaron pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Bare,
    Ed,
    Polaron(usize),
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bare" => Ok(Method::Bare),
            "ed" => Ok(Method::Ed),
            other => other
                .strip_prefix('n')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(Method::Polaron)
                .ok_or_else(|| format!("unknown method '{s}' (expected bare, ed or n<N>)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Bare => f.write_str("bare"),
            Method::Ed => f.write_str("ed"),
            Method::Polaron(n) => write!(f, "n{n}"),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum WaveMethod {
    Ed,
    Polaron,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ConventionArg {
    #[default]
    StatesPerSpin,
    ExtendedByTwo,
}

impl From<ConventionArg> for CutoffConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::StatesPerSpin => CutoffConvention::StatesPerSpin,
            ConventionArg::ExtendedByTwo => CutoffConvention::ExtendedByTwo,
        }
    }
}

/// Coupling range; values are g in the units of ω.
#[derive(Args, Debug, Clone, Serialize)]
struct CouplingRange {
    #[arg(long, default_value_t = 0.0)]
    g_min: f64,
    #[arg(long, default_value_t = 0.5)]
    g_max: f64,
    #[arg(long, default_value_t = 51)]
    g_steps: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-state energy against coupling for several methods
    EnergyScan(EnergyScan),
    /// σx, photon number and correlation against coupling
    ObservablesScan(ObservablesScan),
    /// Spinor components Ψ±(x) of the ground state
    Wavefunction(Wavefunction),
    /// Variational energy against the number of polaron pairs
    PolaronConvergence(PolaronConvergence),
    /// Low-lying levels against coupling, classified at g = ω/2
    SpectrumScan(SpectrumScan),
    /// Spectrum at g = ω/2 against tunneling, with a linear fit of E0
    #[command(name = "collapse-vs-Omega")]
    CollapseVsOmega(CollapseVsOmega),
    /// Lowest two levels against the Fock cutoff
    CutoffScan(CutoffScan),
    /// Bare, induced and effective potentials from the ground state
    Potential(Potential),
}

#[derive(Args, Debug, Clone, Serialize)]
struct EnergyScan {
    /// Tunneling strength Ω
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    #[command(flatten)]
    range: CouplingRange,
    #[arg(long, value_delimiter = ',', default_value = "bare,n1,n2,ed")]
    methods: Vec<Method>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ObservablesScan {
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    #[command(flatten)]
    range: CouplingRange,
    #[arg(long, value_delimiter = ',', default_value = "n1,n2,ed")]
    methods: Vec<Method>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Wavefunction {
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    /// Coupling g
    #[arg(long, default_value_t = 0.4)]
    g: f64,
    #[arg(long, value_enum, default_value_t = WaveMethod::Polaron)]
    method: WaveMethod,
    /// Polaron pairs
    #[arg(long = "N", default_value_t = 2)]
    pairs: usize,
    /// Also write every weighted polaron component
    #[arg(long)]
    decompose: bool,
    /// Grid half-width in oscillator lengths
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    /// Grid points (odd)
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PolaronConvergence {
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    /// Largest number of polaron pairs
    #[arg(long = "N-max", default_value_t = 6)]
    max_pairs: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SpectrumScan {
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    #[command(flatten)]
    range: CouplingRange,
    /// Number of levels per point
    #[arg(long, default_value_t = 20)]
    levels: usize,
    /// Discreteness margin below −ω/2, in units of ω
    #[arg(long, default_value_t = rabi2_core::exact::DEFAULT_DISCRETE_DELTA)]
    delta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CollapseVsOmega {
    #[arg(long = "Omega-min", default_value_t = 0.1)]
    tunneling_min: f64,
    #[arg(long = "Omega-max", default_value_t = 10.0)]
    tunneling_max: f64,
    #[arg(long = "Omega-steps", default_value_t = 21)]
    tunneling_steps: usize,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = rabi2_core::exact::DEFAULT_DISCRETE_DELTA)]
    delta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CutoffScan {
    #[arg(long = "Omega", default_value_t = 1000.0)]
    tunneling: f64,
    #[arg(long, default_value_t = 0.6)]
    g: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "400,800,1200,1600,2000,2400,2800,3200,3600,4000"
    )]
    cutoffs: Vec<usize>,
    #[arg(long, value_enum, default_value_t)]
    cutoff_convention: ConventionArg,
    /// Largest E0/ω step still counted as a plateau
    #[arg(long, default_value_t = 1e-6)]
    plateau_tol: f64,
    /// Smallest E0/ω decrease counted as a drop
    #[arg(long, default_value_t = 1e-3)]
    drop_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Potential {
    #[arg(long = "Omega", default_value_t = 1.0)]
    tunneling: f64,
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    #[arg(long, value_enum, default_value_t = WaveMethod::Ed)]
    method: WaveMethod,
    #[arg(long = "N", default_value_t = 2)]
    pairs: usize,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var("RABI2_WORKERS") else {
        return Ok(());
    };
    let workers: usize = value
        .trim()
        .parse()
        .with_context(|| format!("RABI2_WORKERS must be a positive integer, got '{value}'"))?;
    if workers == 0 {
        bail!("RABI2_WORKERS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("configuring the worker pool")
}

fn run(cli: Cli) -> Result<u8> {
    configure_workers()?;
    let common = &cli.common;
    let report = match &cli.command {
        Command::EnergyScan(a) => commands::energy_scan(common, a)?,
        Command::ObservablesScan(a) => commands::observables_scan(common, a)?,
        Command::Wavefunction(a) => commands::wavefunction(common, a)?,
        Command::PolaronConvergence(a) => commands::polaron_convergence(common, a)?,
        Command::SpectrumScan(a) => commands::spectrum_scan(common, a)?,
        Command::CollapseVsOmega(a) => commands::collapse_vs_omega(common, a)?,
        Command::CutoffScan(a) => commands::cutoff_scan(common, a)?,
        Command::Potential(a) => commands::potential(common, a)?,
    };
    println!("{}", report.dir.display());
    if report.untrusted > 0 {
        eprintln!(
            "warning: {} untrusted point(s); see the untrusted column",
            report.untrusted
        );
        if !common.allow_untrusted {
            return Ok(EXIT_UNTRUSTED);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    output::mark_start();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
