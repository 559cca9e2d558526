//! Acceptance suite. Runs the invocation recorded for each criterion in
//! `fixtures/criteria.toml` against `fixtures/acceptance.toml` and prints one
//! PASS/FAIL line per criterion. Runtime limits apply where the criterion
//! names one. The determinism criterion runs `all-acceptance` twice and
//! compares the JSON reports byte for byte.
//!
//! Run with `cargo test -p zfqft --test acceptance -- --nocapture` to see the
//! summary lines.

mod common;

use std::path::Path;
use std::time::Instant;

use common::{acceptance_config, criteria, zfqft, Criterion};
use serde_json::Value;

struct Verdict {
    id: u8,
    pass: bool,
    line: String,
}

fn invoke(c: &Criterion, json: &Path) -> (i32, String, f64) {
    let mut args = c.args.clone();
    args.extend(["--quiet".into(), "--config".into(), acceptance_config().display().to_string()]);
    args.extend(["--json".into(), json.display().to_string()]);
    let start = Instant::now();
    let out = zfqft(&args);
    (out.code, out.stderr, start.elapsed().as_secs_f64())
}

/// Runs one criterion invocation and checks its report.
fn run_criterion(c: &Criterion, dir: &Path) -> Verdict {
    let json = dir.join(format!("criterion-{}.json", c.id));
    let (code, stderr, secs) = invoke(c, &json);
    if code != 0 && code != 1 {
        return Verdict { id: c.id, pass: false, line: format!("exit code {code}: {}", stderr.trim()) };
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let sections = report["sections"].as_array().unwrap();
    let own: Vec<&Value> = sections.iter().filter(|s| s["criterion"].as_u64() == Some(c.id as u64)).collect();
    let metrics: Vec<&Value> = own.iter().flat_map(|s| s["metrics"].as_array().unwrap()).collect();
    let failed: Vec<String> = metrics
        .iter()
        .filter(|m| m["pass"] == Value::Bool(false))
        .map(|m| format!("{} = {:e}", m["name"].as_str().unwrap(), m["value"].as_f64().unwrap()))
        .collect();
    let within_time = c.max_seconds.is_none_or(|limit| secs < limit);
    let pass = code == 0 && !own.is_empty() && failed.is_empty() && within_time;
    let time = match c.max_seconds {
        Some(limit) => format!("{secs:.2} s < {limit} s"),
        None => format!("{secs:.2} s"),
    };
    let mut line = format!("{} metrics within tolerance, {time}", metrics.len());
    if !failed.is_empty() {
        line.push_str(&format!("; failing: {}", failed.join("; ")));
    }
    if !within_time {
        line.push_str("; runtime limit exceeded");
    }
    Verdict { id: c.id, pass, line }
}

/// Runs the determinism invocation twice, concurrently, and compares bytes.
fn run_determinism(c: &Criterion, dir: &Path) -> Verdict {
    let (a, b) = (dir.join("determinism-a.json"), dir.join("determinism-b.json"));
    let start = Instant::now();
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| invoke(c, &a));
        let hb = s.spawn(|| invoke(c, &b));
        (ha.join().unwrap(), hb.join().unwrap())
    });
    let secs = start.elapsed().as_secs_f64();
    if ra.0 != 0 || rb.0 != 0 {
        return Verdict { id: c.id, pass: false, line: format!("exit codes {} and {}: {}", ra.0, rb.0, ra.1.trim()) };
    }
    let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let same = ba == bb;
    let line = format!(
        "two `{}` reports of {} bytes are {}, {secs:.2} s",
        c.args.join(" "),
        ba.len(),
        if same { "byte-identical" } else { "different" }
    );
    Verdict { id: c.id, pass: same, line }
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let mut verdicts = Vec::new();
    for c in criteria() {
        let v = if c.id == 9 { run_determinism(&c, dir.path()) } else { run_criterion(&c, dir.path()) };
        println!(
            "criterion {} {}: {} ({})",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            c.name,
            v.line
        );
        verdicts.push(v);
    }
    assert_eq!(verdicts.len(), 9);
    let failed: Vec<u8> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
