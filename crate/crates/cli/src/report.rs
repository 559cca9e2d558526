//! Report sections, the JSON bundle and its human-readable and CSV renderings.
//!
//! Reports contain no timings or host information, so identical inputs give
//! byte-identical JSON.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Version of the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Whether a metric must stay below or reach its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// value < threshold.
    Below,
    /// value ≥ threshold.
    AtLeast,
    /// No threshold; informational only.
    Info,
}

/// One scalar outcome of a section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    /// Metric name.
    pub name: String,
    /// Measured value.
    pub value: f64,
    /// Threshold, absent for informational metrics.
    pub threshold: Option<f64>,
    /// How the value is compared with the threshold.
    pub comparison: Comparison,
    /// Outcome of the comparison.
    pub pass: bool,
}

impl Metric {
    /// A residual that must stay below `tol`.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, threshold: Some(tol), comparison: Comparison::Below, pass: value < tol }
    }

    /// A quantity that must reach `min`.
    pub fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        Self { name: name.into(), value, threshold: Some(min), comparison: Comparison::AtLeast, pass: value >= min }
    }

    /// A boolean condition, recorded as 1 or 0.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: Some(1.0),
            comparison: Comparison::AtLeast,
            pass: ok,
        }
    }

    /// A value reported without a threshold.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, threshold: None, comparison: Comparison::Info, pass: true }
    }
}

/// A plot-ready table written as CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    /// Column headers.
    pub columns: Vec<String>,
    /// Rows of stringified cells.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Empty table with the given headers.
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row.
    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// The outcome of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    /// Short identifier, also used as the CSV file stem.
    pub name: String,
    /// Acceptance criterion covered, if any.
    pub criterion: Option<u8>,
    /// Conjunction of all metrics.
    pub pass: bool,
    /// Thresholded scalar outcomes.
    pub metrics: Vec<Metric>,
    /// Plot-ready table.
    pub table: Table,
    /// Full reports from the numerical layer.
    pub detail: Value,
}

impl Section {
    /// Builds a section; `pass` is derived from the metrics.
    pub fn new(name: &str, criterion: Option<u8>, metrics: Vec<Metric>, table: Table, detail: Value) -> Self {
        let pass = metrics.iter().all(|m| m.pass);
        Self { name: name.into(), criterion, pass, metrics, table, detail }
    }
}

/// The JSON document written by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportBundle {
    /// Layout version.
    pub schema: u32,
    /// Tool name.
    pub tool: String,
    /// Tool version.
    pub version: String,
    /// Subcommand that produced the report.
    pub command: String,
    /// Seed of every random stream.
    pub seed: u64,
    /// Effective configuration after overrides.
    pub config: Value,
    /// Experiment outcomes.
    pub sections: Vec<Section>,
    /// Conjunction of the section outcomes.
    pub pass: bool,
}

impl ReportBundle {
    /// Bundles sections; `pass` is derived from them.
    pub fn new(command: &str, seed: u64, config: Value, sections: Vec<Section>) -> Self {
        let pass = sections.iter().all(|s| s.pass);
        Self {
            schema: SCHEMA_VERSION,
            tool: "zfqft".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            sections,
            pass,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Human-readable summary: one line per section, then its metrics.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let crit = s.criterion.map_or_else(|| "-".to_string(), |c| c.to_string());
            out.push_str(&format!("[{}] criterion {crit:>2}  {}\n", verdict(s.pass), s.name));
            for m in &s.metrics {
                let cmp = match (m.comparison, m.threshold) {
                    (Comparison::Below, Some(t)) => format!("< {t:.1e}"),
                    (Comparison::AtLeast, Some(t)) => format!(">= {t:.1e}"),
                    _ => String::new(),
                };
                out.push_str(&format!("    {:<4} {:<52} {:>12.3e} {cmp}\n", verdict(m.pass), m.name, m.value));
            }
        }
        out.push_str(&format!("overall: {}\n", verdict(self.pass)));
        out
    }

    /// Writes the JSON report.
    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        write_file(path, self.to_json().as_bytes())
    }

    /// Writes one `<section>.csv` per non-empty table, plus `metrics.csv`.
    pub fn write_csv(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.sections {
            if s.table.columns.is_empty() {
                continue;
            }
            let k = counts.entry(&s.name).or_insert(0);
            *k += 1;
            let stem = if *k == 1 { s.name.clone() } else { format!("{}-{k}", s.name) };
            let mut w = csv::Writer::from_path(dir.join(format!("{stem}.csv")))?;
            w.write_record(&s.table.columns)?;
            for row in &s.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        let mut w = csv::Writer::from_path(dir.join("metrics.csv"))?;
        w.write_record(["section", "criterion", "metric", "value", "threshold", "comparison", "pass"])?;
        for s in &self.sections {
            for m in &s.metrics {
                w.write_record([
                    s.name.clone(),
                    s.criterion.map_or_else(String::new, |c| c.to_string()),
                    m.name.clone(),
                    fmt_num(m.value),
                    m.threshold.map_or_else(String::new, fmt_num),
                    serde_json::to_value(m.comparison).expect("serializes").as_str().unwrap_or_default().to_string(),
                    m.pass.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation of a float.
pub fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Writes bytes, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_comparisons() {
        assert!(Metric::below("r", 1e-12, 1e-10).pass);
        assert!(!Metric::below("r", 1e-10, 1e-10).pass);
        assert!(Metric::at_least("q", 1e3, 1e3).pass);
        assert!(!Metric::flag("f", false).pass);
        assert!(Metric::info("i", f64::MAX).pass);
    }

    #[test]
    fn bundle_pass_is_conjunction() {
        let ok = Section::new("a", Some(1), vec![Metric::below("r", 0.0, 1.0)], Table::default(), Value::Null);
        let bad = Section::new("b", None, vec![Metric::below("r", 2.0, 1.0)], Table::default(), Value::Null);
        assert!(ReportBundle::new("x", 0, Value::Null, vec![ok.clone()]).pass);
        let both = ReportBundle::new("x", 0, Value::Null, vec![ok, bad]);
        assert!(!both.pass);
        assert!(both.render_table().contains("overall: FAIL"));
    }
}
