//! End-to-end tests of the `zfqft` binary: exit codes, diagnostics, output
//! files and golden reports.
//!
//! Golden reports are compared byte for byte. After an intentional change,
//! regenerate them with `ZFQFT_BLESS=1 cargo test -p zfqft --test cli`.

mod common;

use std::path::Path;

use clap::Parser;
use common::{acceptance_config, criteria, fixtures, zfqft};
use serde_json::Value;
use zfqft_cli::config::Config;
use zfqft_cli::Cli;
use zfqft_core::fockspace::FockState;

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs an invocation with the acceptance config and compares its JSON report
/// with the golden file.
fn golden(name: &str, args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    full.extend(["--quiet".into(), "--config".into(), acceptance_config().display().to_string()]);
    full.extend(["--json".into(), out.display().to_string()]);
    let run = zfqft(&full);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let got = std::fs::read(&out).unwrap();
    let path = fixtures().join("golden").join(format!("{name}.json"));
    if std::env::var_os("ZFQFT_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(got == want, "report of `{}` differs from {}", args.join(" "), path.display());
}

#[test]
fn golden_symmetry_report() {
    golden("check-smatrix-sinh", &["check-smatrix", "--family", "sinh_factor", "--b", "0.785"]);
}

#[test]
fn golden_two_particle_report() {
    golden("scatter-const1", &["scatter", "--s", "const:1", "--n", "2"]);
}

#[test]
fn golden_car_report() {
    golden("car-disorder-1-1", &["car-disorder", "--n-left", "1", "--n-right", "1"]);
}

#[test]
fn symmetry_example_passes_with_table() {
    let run = zfqft(&["check-smatrix", "--family", "sinh_factor", "--b", "0.785"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("[PASS] criterion  2  symmetry"), "{}", run.stdout);
    assert!(run.stdout.contains("sinh:0.785 max residual"));
    assert!(run.stdout.ends_with("overall: PASS\n"));
}

#[test]
fn free_two_particle_phase_is_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let dump = dir.path().join("out.zfqf");
    let run = zfqft(&[
        "scatter",
        "--s",
        "const:1",
        "--n",
        "2",
        "--quiet",
        "--json",
        json.to_str().unwrap(),
        "--dump-state",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.is_empty());
    let report = read_json(&json);
    let rep = &report["sections"][0]["detail"][0];
    assert_eq!(rep["phase"][0].as_f64(), Some(-1.0));
    assert_eq!(rep["phase"][1].as_f64(), Some(0.0));
    assert!(rep["relative_error"].as_f64().unwrap() < 5e-3);
    // The dump holds W_out for two packets: empty except in the two-particle sector.
    let bytes = std::fs::read(&dump).unwrap();
    assert_eq!(&bytes[..4], b"ZFQF");
    let n_points = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
    assert_eq!(n_points, 64);
    let state = FockState::from_zfqf_bytes(&bytes, 1.3125 / 63.0).unwrap();
    assert!(state.sector(1).iter().all(|z| z.norm() == 0.0));
    assert!(state.sector(2).iter().any(|z| z.norm() > 0.0));
}

#[test]
fn malformed_config_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "seed = 3\n[zf]\nsamples = \"many\"\n").unwrap();
    let run = zfqft(&["check-smatrix", "--config", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    let loc = format!("{}:3:11", path.display());
    assert!(run.stderr.contains(&loc), "{}", run.stderr);

    std::fs::write(&path, "seed = 3\n\n[tolerances]\n  zff = 1e-3\n").unwrap();
    let run = zfqft(&["check-smatrix", "--config", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains(&format!("{}:4:3", path.display())), "{}", run.stderr);

    std::fs::write(&path, "grid = { theta_min = 1.0, theta_max = 0.0, n_points = 8 }\n").unwrap();
    let run = zfqft(&["zf-verify", "--config", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("grid"), "{}", run.stderr);

    let run = zfqft(&["check-smatrix", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(run.code, 2);
}

#[test]
fn argument_errors_exit_with_two() {
    assert_eq!(zfqft(&["no-such-command"]).code, 2);
    assert_eq!(zfqft(&["check-smatrix", "--s", "sinh:abc"]).code, 2);
    assert_eq!(zfqft(&["check-smatrix", "--family", "product"]).code, 2);
    assert_eq!(zfqft(&["check-smatrix", "--tol-override", "nope=1"]).code, 2);
    assert_eq!(zfqft(&["car-disorder", "--n-left", "1"]).code, 2);
    assert_eq!(zfqft(&["scatter", "--n", "4"]).code, 2);
    assert_eq!(zfqft(&["--help"]).code, 0);
}

#[test]
fn boundary_poles_need_the_flag() {
    let run = zfqft(&["check-smatrix", "--s", "sinh:0"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--allow-boundary-poles"), "{}", run.stderr);
    // Accepted with the flag; the sampled strip stays away from the boundary.
    let run = zfqft(&["check-smatrix", "--s", "sinh:0", "--allow-boundary-poles", "--quiet"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    // Interior poles are never accepted.
    assert_eq!(zfqft(&["check-smatrix", "--s", "sinh:-0.5", "--allow-boundary-poles"]).code, 2);
}

#[test]
fn failing_criterion_exits_with_one() {
    let run = zfqft(&["check-smatrix", "--s", "sinh:0.7", "--tol-override", "symmetry=1e-30"]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("overall: FAIL"));
}

#[test]
fn numeric_failure_exits_with_three() {
    // Six modes exceed the size limit of the dense CAR model.
    let run = zfqft(&["car-disorder", "--n-left", "3", "--n-right", "3"]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("numeric failure"), "{}", run.stderr);
}

#[test]
fn csv_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let run = zfqft(&["car-disorder", "--n-left", "1", "--n-right", "1", "--quiet", "--csv", dir.path().to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let mut reader = csv::Reader::from_path(dir.path().join("car-disorder.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["n_left", "n_right", "check", "residual", "tolerance", "pass", "detail"]);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| &r[5] == "true"));
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), rows.len() + 1);
}

#[test]
fn acceptance_fixture_equals_defaults() {
    assert_eq!(Config::load(&acceptance_config()).unwrap(), Config::default());
}

#[test]
fn every_criterion_maps_to_one_valid_invocation() {
    let list = criteria();
    let ids: Vec<u8> = list.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=9).collect::<Vec<_>>());
    for c in &list {
        let argv = std::iter::once("zfqft".to_string()).chain(c.args.iter().cloned());
        let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| panic!("criterion {}: {e}", c.id));
        assert_eq!(cli.command.name(), c.args[0]);
    }
}
