//! Tables, run directories and manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => u8::from(*b).to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Flag(b) => s.serialize_bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Shortest round-trip decimal; exponent form outside a readable range,
/// `nan` for values that are undefined at a point.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "nan".into();
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column-oriented result table. The first column is the abscissa.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    /// Unit of each column, in the same order.
    pub units: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Columns drawn against the first one by the companion gnuplot script.
    #[serde(skip)]
    pub plot: Vec<usize>,
}

impl Table {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
            units: Vec::new(),
            rows: Vec::new(),
            plot: Vec::new(),
        }
    }

    pub fn column(mut self, name: impl Into<String>, unit: impl Into<String>) -> Self {
        self.columns.push(name.into());
        self.units.push(unit.into());
        self
    }

    /// Adds a column that the gnuplot script should draw.
    pub fn plotted(mut self, name: impl Into<String>, unit: impl Into<String>) -> Self {
        self.plot.push(self.columns.len());
        self.column(name, unit)
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, notes: &[String]) -> String {
        let mut out = String::new();
        for note in notes {
            let _ = writeln!(out, "# {note}");
        }
        let units: Vec<String> = self
            .columns
            .iter()
            .zip(&self.units)
            .map(|(c, u)| format!("{c} [{u}]"))
            .collect();
        let _ = writeln!(out, "# units: {}", units.join(", "));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn gnuplot(&self, data_file: &str) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set datafile missing 'nan'\n");
        let _ = writeln!(s, "set xlabel '{} [{}]'", self.columns[0], self.units[0]);
        s.push_str("set key autotitle columnheader\n");
        let curves: Vec<String> = self
            .plot
            .iter()
            .map(|&c| format!("'{data_file}' using 1:{} with linespoints", c + 1))
            .collect();
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
        s
    }
}

#[derive(Serialize)]
struct Versions {
    rabi2_cli: &'static str,
    rabi2_core: &'static str,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    subcommand: &'a str,
    versions: Versions,
    parameters: &'a serde_json::Value,
    cutoff_convention: &'a str,
    seed: u64,
    workers: usize,
    wall_time_seconds: f64,
    outputs: &'a [String],
    untrusted_points: usize,
}

static STARTED: OnceLock<Instant> = OnceLock::new();

/// Starts the wall clock reported in the manifest.
pub fn mark_start() {
    STARTED.get_or_init(Instant::now);
}

/// One invocation's output directory.
pub struct Run {
    dir: PathBuf,
    subcommand: String,
    parameters: serde_json::Value,
    format: Format,
    gnuplot: bool,
    outputs: Vec<String>,
    untrusted: usize,
}

/// Directory name for a parameter set: identical flags map to the same
/// directory, different flags never collide.
pub fn run_dir_name(subcommand: &str, parameters: &serde_json::Value) -> String {
    let digest = Sha256::digest(parameters.to_string().as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{subcommand}-{hex}")
}

impl Run {
    pub fn create(
        root: &Path,
        subcommand: &str,
        parameters: serde_json::Value,
        format: Format,
        gnuplot: bool,
    ) -> Result<Self> {
        if gnuplot && format == Format::Json {
            bail!("--gnuplot needs --format csv");
        }
        let dir = root.join(run_dir_name(subcommand, &parameters));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            subcommand: subcommand.to_owned(),
            parameters,
            format,
            gnuplot,
            outputs: Vec::new(),
            untrusted: 0,
        })
    }

    pub fn flag_untrusted(&mut self, count: usize) {
        self.untrusted += count;
    }

    fn write(&mut self, name: String, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(&name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name);
        Ok(())
    }

    /// Writes `stem.csv` or `stem.json`, plus `stem.gp` when requested.
    pub fn table(&mut self, stem: &str, table: &Table, notes: &[String]) -> Result<()> {
        match self.format {
            Format::Csv => {
                let name = format!("{stem}.csv");
                self.write(name.clone(), table.to_csv(notes).as_bytes())?;
                if self.gnuplot && !table.plot.is_empty() {
                    self.write(format!("{stem}.gp"), table.gnuplot(&name).as_bytes())?;
                }
            }
            Format::Json => {
                let doc = serde_json::json!({ "notes": notes, "table": table });
                self.json(stem, &doc)?;
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(format!("{stem}.json"), text.as_bytes())
    }

    /// Writes `manifest.json` and returns the run directory.
    pub fn finish(mut self, cutoff_convention: &str, seed: u64) -> Result<(PathBuf, usize)> {
        self.outputs.push("manifest.json".into());
        let manifest = RunManifest {
            tool: "rabi2",
            subcommand: &self.subcommand,
            versions: Versions {
                rabi2_cli: env!("CARGO_PKG_VERSION"),
                rabi2_core: rabi2_core::VERSION,
            },
            parameters: &self.parameters,
            cutoff_convention,
            seed,
            workers: rayon::current_num_threads(),
            wall_time_seconds: STARTED.get_or_init(Instant::now).elapsed().as_secs_f64(),
            outputs: &self.outputs,
            untrusted_points: self.untrusted,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok((self.dir, self.untrusted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_without_locale() {
        for v in [-0.5, 0.1, 1.0 / 3.0, -1e-9, 2.5e20, 0.0] {
            let s = format_float(v);
            assert!(!s.contains(','));
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new().column("x", "1").plotted("E", "energy");
        t.push(vec![0.5.into(), f64::NAN.into()]);
        let csv = t.to_csv(&["note".into()]);
        assert_eq!(csv, "# note\n# units: x [1], E [energy]\nx,E\n0.5,nan\n");
    }

    #[test]
    fn json_cells_map_nan_to_null() {
        let cells = vec![Cell::Num(f64::NAN), Cell::Int(3), Cell::Flag(true), "a".into()];
        assert_eq!(serde_json::to_string(&cells).unwrap(), r#"[null,3,true,"a"]"#);
    }

    #[test]
    fn directory_names_follow_parameters() {
        let a = serde_json::json!({"g": 0.1});
        let b = serde_json::json!({"g": 0.2});
        assert_eq!(run_dir_name("x", &a), run_dir_name("x", &a));
        assert_ne!(run_dir_name("x", &a), run_dir_name("x", &b));
    }
}
