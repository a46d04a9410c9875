use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn rabi2(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi2"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("RABI2_OUT")
        .env_remove("RABI2_WORKERS")
        .output()
        .expect("binary runs")
}

fn run_dir(output: &Output) -> PathBuf {
    assert!(
        !output.stdout.is_empty(),
        "no run directory printed; stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout.clone()).unwrap();
    PathBuf::from(stdout.lines().last().unwrap().trim())
}

/// Header and numeric rows of a CSV table, comment lines skipped.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn zero_coupling_gives_the_decoupled_energy_for_every_method() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(tmp.path(), &["energy-scan", "--g-steps", "1", "--n-max", "200"]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&run_dir(&out).join("energy.csv"));
    assert_eq!(header, ["g_over_omega", "E_bare", "E_N1", "E_N2", "E_ED", "untrusted"]);
    assert_eq!(rows.len(), 1);
    for e in &rows[0][1..5] {
        assert!((e + 0.5).abs() < 1e-9, "{e}");
    }
}

#[test]
fn energy_scan_orders_the_methods() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(tmp.path(), &["energy-scan", "--g-steps", "11", "--n-max", "799"]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&run_dir(&out).join("energy.csv"));
    let [bare, n1, n2, ed] = ["E_bare", "E_N1", "E_N2", "E_ED"].map(|c| column(&header, c));
    for r in &rows {
        assert!(r[bare] >= r[n1] - 1e-12, "{r:?}");
        assert!(r[n1] >= r[n2] - 1e-12, "{r:?}");
        assert!(r[n2] >= r[ed] - 1e-9, "{r:?}");
    }
    let last = rows.last().unwrap();
    assert_eq!(last[0], 0.5);
    assert!((last[bare] + 0.5).abs() < 1e-12);
}

#[test]
fn exact_output_is_byte_identical_across_runs_and_workers() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["energy-scan", "--methods", "ed", "--g-steps", "9", "--n-max", "300"];
    let first = rabi2(a.path(), &args);
    let second = Command::new(env!("CARGO_BIN_EXE_rabi2"))
        .args(args)
        .arg("--out-dir")
        .arg(b.path())
        .env("RABI2_WORKERS", "3")
        .output()
        .unwrap();
    assert!(first.status.success() && second.status.success());
    let (da, db) = (run_dir(&first), run_dir(&second));
    assert_eq!(da.file_name(), db.file_name());
    assert_eq!(
        fs::read(da.join("energy.csv")).unwrap(),
        fs::read(db.join("energy.csv")).unwrap()
    );
}

#[test]
fn variational_reruns_agree() {
    let tmp = TempDir::new().unwrap();
    let args = ["polaron-convergence", "--N-max", "3", "--n-max", "400"];
    let first = read_csv(&run_dir(&rabi2(tmp.path(), &args)).join("convergence.csv")).1;
    let other = TempDir::new().unwrap();
    let second = read_csv(&run_dir(&rabi2(other.path(), &args)).join("convergence.csv")).1;
    for (x, y) in first.iter().zip(&second) {
        assert!((x[1] - y[1]).abs() <= 1e-10);
    }
    // the error shrinks with every added pair
    assert!(first.windows(2).all(|w| w[1][3] < w[0][3]));
}

#[test]
fn manifest_lists_every_output_file() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(
        tmp.path(),
        &["wavefunction", "--decompose", "--points", "201", "--gnuplot"],
    );
    assert!(out.status.success());
    let dir = run_dir(&out);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    let listed: BTreeSet<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_owned())
        .collect();
    let present: BTreeSet<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(listed, present);
    for key in [
        "parameters",
        "cutoff_convention",
        "versions",
        "wall_time_seconds",
        "seed",
    ] {
        assert!(!manifest[key].is_null(), "{key}");
    }
    let (header, _) = read_csv(&dir.join("wavefunction.csv"));
    assert_eq!(header.len(), 7);
}

#[test]
fn untrusted_points_set_the_exit_status() {
    let tmp = TempDir::new().unwrap();
    let args = ["cutoff-scan", "--Omega", "10", "--cutoffs", "40,80,120"];
    let out = rabi2(tmp.path(), &args);
    assert_eq!(out.status.code(), Some(3));
    assert!(run_dir(&out).join("cutoff.csv").exists());
    let mut allowed: Vec<&str> = args.to_vec();
    allowed.push("--allow-untrusted");
    assert!(rabi2(tmp.path(), &allowed).status.success());
}

#[test]
fn usage_errors_exit_nonzero_without_output() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(tmp.path(), &["energy-scan", "--g-max", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g/omega"));
    assert_eq!(fs::read_dir(tmp.path()).map(|d| d.count()).unwrap_or(0), 0);

    let bad = rabi2(tmp.path(), &["energy-scan", "--methods", "gauss"]);
    assert!(!bad.status.success());
}

#[test]
fn json_tables_carry_columns_and_nulls() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(
        tmp.path(),
        &[
            "observables-scan",
            "--methods",
            "bare",
            "--g-min",
            "0.5",
            "--g-steps",
            "1",
            "--format",
            "json",
        ],
    );
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_slice(&fs::read(run_dir(&out).join("observables.json")).unwrap()).unwrap();
    assert_eq!(doc["table"]["columns"][1], "E_bare");
    assert!(doc["table"]["rows"][0][1].is_null());
}

#[test]
fn output_root_from_environment() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rabi2"))
        .args([
            "spectrum-scan",
            "--g-min",
            "0.5",
            "--g-steps",
            "1",
            "--levels",
            "4",
            "--n-max",
            "200",
        ])
        .env("RABI2_OUT", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let dir = run_dir(&out);
    assert!(dir.starts_with(tmp.path()));
    let text = fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    assert!(text.contains(",discrete,"));
}

#[test]
fn potential_curves_at_the_collapse_point() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(tmp.path(), &["potential", "--n-max", "799", "--points", "401"]);
    assert!(out.status.success());
    let dir = run_dir(&out);
    let (header, rows) = read_csv(&dir.join("potential.csv"));
    assert_eq!(
        header,
        [
            "x",
            "v_plus",
            "v_minus",
            "dv_plus",
            "dv_minus",
            "veff_plus",
            "veff_minus",
            "mask_plus",
            "mask_minus"
        ]
    );
    // at g = ω/2 the spin-down channel is entirely the induced potential
    let centre = &rows[rows.len() / 2];
    assert_eq!(centre[0], 0.0);
    assert_eq!(centre[2], 0.0);
    assert!(centre[4] < 0.0 && centre[4] == centre[6]);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["well_depth"].as_f64().unwrap() > 0.0);
}

#[test]
fn collapse_scan_reports_a_fit() {
    let tmp = TempDir::new().unwrap();
    let out = rabi2(
        tmp.path(),
        &[
            "collapse-vs-Omega",
            "--Omega-min",
            "1",
            "--Omega-max",
            "5",
            "--Omega-steps",
            "5",
            "--n-max",
            "400",
        ],
    );
    assert!(out.status.success());
    let fit: serde_json::Value = serde_json::from_slice(&fs::read(run_dir(&out).join("fit.json")).unwrap()).unwrap();
    assert!(fit["ground_fit"]["slope"].as_f64().unwrap() < 0.0);
}
