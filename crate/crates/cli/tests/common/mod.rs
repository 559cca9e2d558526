//! Shared helpers for the CLI integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Deserialize;

/// Directory holding the configuration and golden fixtures.
pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// The acceptance configuration file.
pub fn acceptance_config() -> PathBuf {
    fixtures().join("acceptance.toml")
}

/// Outcome of one binary invocation.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `zfqft` binary with the given arguments.
pub fn zfqft<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_zfqft")).args(args).output().expect("binary runs");
    Outcome {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// One entry of the criterion-to-invocation map.
#[derive(Debug, Deserialize)]
pub struct Criterion {
    pub id: u8,
    pub name: String,
    pub args: Vec<String>,
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct CriteriaFile {
    criterion: Vec<Criterion>,
}

/// The criterion-to-invocation map, in file order.
pub fn criteria() -> Vec<Criterion> {
    let text = std::fs::read_to_string(fixtures().join("criteria.toml")).expect("criteria fixture");
    toml::from_str::<CriteriaFile>(&text).expect("criteria fixture parses").criterion
}
