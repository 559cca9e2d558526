//! Configuration-driven experiment runner for the zfqft numerical laboratory.
//!
//! The binary `zfqft` exposes one subcommand per experiment plus
//! `all-acceptance`, which runs every acceptance experiment in a fixed order.
//! Each run produces a [`report::ReportBundle`]: a versioned JSON document,
//! a human-readable table and optional plot-ready CSV files.
//!
//! Exit codes: 0 when every hard criterion passes, 1 when one fails, 2 for
//! configuration or argument errors and 3 for numerical failures.

pub mod config;
pub mod report;
pub mod runner;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use zfqft_core::smatrix::ScatteringFunction;

use config::{check_strip, parse_smatrix, Config, ConfigError};
use report::{ReportBundle, Section};

/// Exit code when every criterion passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when a criterion fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for configuration and argument errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures and I/O errors while writing outputs.
pub const EXIT_NUMERIC: i32 = 3;

/// Failure of a run before a verdict could be reached.
#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration or arguments.
    Config(ConfigError),
    /// The numerical layer reported an error.
    Numeric(zfqft_core::Error),
    /// Writing an output file failed.
    Io(String),
}

impl RunError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numeric(_) | Self::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e}"),
            Self::Numeric(e) => write!(f, "numeric failure: {e}"),
            Self::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<zfqft_core::Error> for RunError {
    fn from(e: zfqft_core::Error) -> Self {
        Self::Numeric(e)
    }
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(name = "zfqft", version, about = "Numerical laboratory for graded integrable quantum field theories")]
pub struct Cli {
    /// Flags shared by all subcommands.
    #[command(flatten)]
    pub global: GlobalArgs,
    /// The experiment to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed of every random stream (overrides the configuration).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides one tolerance, e.g. `zf=1e-9`; may be repeated.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VAL")]
    pub tol_override: Vec<String>,
    /// Writes the JSON report to this path.
    #[arg(long, global = true, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Writes plot-ready CSV tables into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub csv: Option<PathBuf>,
    /// Suppresses the human-readable table.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Accepts scattering functions with poles on the strip boundary.
    #[arg(long = "allow-boundary-poles", global = true)]
    pub allow_boundary_poles: bool,
}

/// Scattering function selection on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct SmatrixArgs {
    /// Scattering function descriptor: `const:1`, `const:-1`, `sinh:B` or `product:B1,B2`.
    #[arg(long = "s", value_name = "DESC", conflicts_with = "family")]
    pub s: Option<String>,
    /// Scattering function family: `const`, `sinh_factor` or `product`.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,
    /// Family parameter: the constant, or the pole parameter(s) b.
    #[arg(long = "b", value_name = "B", value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Vec<f64>,
}

impl SmatrixArgs {
    /// The descriptor selected by the flags, if any.
    pub fn descriptor(&self) -> Result<Option<String>, ConfigError> {
        if let Some(s) = &self.s {
            return Ok(Some(s.clone()));
        }
        let Some(family) = &self.family else {
            if !self.b.is_empty() {
                return Err(ConfigError::new("--b needs --family"));
            }
            return Ok(None);
        };
        let join = |b: &[f64]| b.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let one = |kind: &str| match self.b.as_slice() {
            [b] => Ok(format!("{kind}:{b}")),
            _ => Err(ConfigError::new(format!("family '{family}' needs exactly one --b value"))),
        };
        match family.as_str() {
            "const" | "constant" => one("const").map(Some),
            "sinh" | "sinh_factor" => one("sinh").map(Some),
            "product" if !self.b.is_empty() => Ok(Some(format!("product:{}", join(&self.b)))),
            "product" => Err(ConfigError::new("family 'product' needs at least one --b value")),
            other => Err(ConfigError::new(format!("unknown scattering function family '{other}'"))),
        }
    }
}

/// Which scattering experiment to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum ScatterCheck {
    /// Smeared S-matrix elements against the analytic kernel.
    #[default]
    Element,
    /// Graded exchange antisymmetry and projector norms.
    Statistics,
    /// Polarization-free generator identities.
    Pfg,
}

/// Subcommands.
#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Symmetry relations of S on the physical strip.
    CheckSmatrix(SmatrixArgs),
    /// Zamolodchikov-Faddeev relations on the truncated Fock space.
    ZfVerify(SmatrixArgs),
    /// Decay of wedge-local (anti)commutators with spacelike separation.
    WedgeLocality(SmatrixArgs),
    /// Scattering experiments.
    Scatter {
        /// Scattering function selection.
        #[command(flatten)]
        smatrix: SmatrixArgs,
        /// Number of particles for `--check element`.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Experiment to run.
        #[arg(long, value_enum, default_value_t = ScatterCheck::Element)]
        check: ScatterCheck,
        /// Writes the outgoing state of the first scattering function as a ZFQF dump.
        #[arg(long = "dump-state", value_name = "PATH")]
        dump_state: Option<PathBuf>,
    },
    /// Form factor axioms and boundary values.
    FfVerify,
    /// Finite CAR model: disorder operators, conditional expectation and nets.
    CarDisorder {
        /// Modes left of the split (default: the configured symmetric sizes).
        #[arg(long = "n-left", requires = "n_right")]
        n_left: Option<usize>,
        /// Modes right of the split.
        #[arg(long = "n-right", requires = "n_left")]
        n_right: Option<usize>,
    },
    /// Every acceptance experiment, in criterion order.
    AllAcceptance,
}

impl Command {
    /// Kebab-case subcommand name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::CheckSmatrix(_) => "check-smatrix",
            Self::ZfVerify(_) => "zf-verify",
            Self::WedgeLocality(_) => "wedge-locality",
            Self::Scatter { .. } => "scatter",
            Self::FfVerify => "ff-verify",
            Self::CarDisorder { .. } => "car-disorder",
            Self::AllAcceptance => "all-acceptance",
        }
    }
}

/// Loads the configuration and applies the global command-line overrides.
pub fn effective_config(global: &GlobalArgs) -> Result<Config, ConfigError> {
    let mut cfg = match &global.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    cfg.tolerances.apply_overrides(&global.tol_override)?;
    if global.allow_boundary_poles {
        cfg.allow_boundary_poles = true;
    }
    if let Some(p) = &global.json {
        cfg.output.json = Some(p.clone());
    }
    if let Some(p) = &global.csv {
        cfg.output.csv_dir = Some(p.clone());
    }
    Ok(cfg)
}

/// Resolves the scattering functions of a section: command line first, then
/// the configured `smatrix`, then the section's family list.
pub fn resolve_families(
    cfg: &Config,
    args: &SmatrixArgs,
    section_default: &[String],
) -> Result<Vec<ScatteringFunction>, ConfigError> {
    let descriptors = match (args.descriptor()?, &cfg.smatrix) {
        (Some(d), _) => vec![d],
        (None, Some(spec)) => vec![spec.descriptor()],
        (None, None) => section_default.to_vec(),
    };
    descriptors
        .iter()
        .map(|d| {
            let s = parse_smatrix(d)?;
            check_strip(&s, cfg.allow_boundary_poles)?;
            Ok(s)
        })
        .collect()
}

/// Runs every acceptance experiment (criteria 1 to 8) in order.
pub fn acceptance_sections(cfg: &Config) -> Result<Vec<Section>, RunError> {
    let none = SmatrixArgs::default();
    let zf_fams = resolve_families(cfg, &none, &cfg.zf.families)?;
    let sym_fams = resolve_families(cfg, &none, &cfg.symmetry.families)?;
    let loc_fams = resolve_families(cfg, &none, &cfg.locality.families)?;
    let sc_fams = resolve_families(cfg, &none, &cfg.scatter.families)?;
    let sizes: Vec<(usize, usize)> = cfg.car.sizes.iter().map(|&n| (n, n)).collect();
    Ok(vec![
        runner::zf(cfg, &zf_fams)?,
        runner::symmetry(cfg, &sym_fams)?,
        runner::locality(cfg, &loc_fams)?,
        runner::scatter_elements(cfg, &sc_fams, 2)?.0,
        runner::statistics(cfg)?,
        runner::pfg(cfg, &sc_fams)?,
        runner::formfactors(cfg)?,
        runner::car(cfg, &sizes)?,
    ])
}

/// Executes a subcommand and writes the configured outputs.
pub fn run(cli: &Cli) -> Result<ReportBundle, RunError> {
    let mut cfg = effective_config(&cli.global)?;
    let mut dump = None;
    let sections = match &cli.command {
        Command::CheckSmatrix(a) => vec![runner::symmetry(&cfg, &resolve_families(&cfg, a, &cfg.symmetry.families)?)?],
        Command::ZfVerify(a) => vec![runner::zf(&cfg, &resolve_families(&cfg, a, &cfg.zf.families)?)?],
        Command::WedgeLocality(a) => vec![runner::locality(&cfg, &resolve_families(&cfg, a, &cfg.locality.families)?)?],
        Command::Scatter { smatrix, n, check, dump_state } => {
            if let Some(p) = dump_state {
                cfg.output.dump_state = Some(p.clone());
            }
            let fams = resolve_families(&cfg, smatrix, &cfg.scatter.families)?;
            match check {
                ScatterCheck::Element => {
                    let n_max = cfg.truncation.unwrap_or(cfg.scatter.truncation);
                    if *n == 0 || *n > n_max {
                        return Err(ConfigError::new(format!("--n must lie in 1..={n_max}, got {n}")).into());
                    }
                    let (section, bytes) = runner::scatter_elements(&cfg, &fams, *n)?;
                    dump = bytes;
                    vec![section]
                }
                ScatterCheck::Statistics => vec![runner::statistics(&cfg)?],
                ScatterCheck::Pfg => vec![runner::pfg(&cfg, &fams)?],
            }
        }
        Command::FfVerify => vec![runner::formfactors(&cfg)?],
        Command::CarDisorder { n_left, n_right } => {
            let sizes = match (n_left, n_right) {
                (Some(l), Some(r)) => vec![(*l, *r)],
                _ => cfg.car.sizes.iter().map(|&n| (n, n)).collect(),
            };
            vec![runner::car(&cfg, &sizes)?]
        }
        Command::AllAcceptance => acceptance_sections(&cfg)?,
    };
    let config_json = serde_json::to_value(&cfg).expect("config serializes");
    let bundle = ReportBundle::new(cli.command.name(), cfg.seed, config_json, sections);
    write_outputs(&cfg, &bundle, dump.as_deref())?;
    Ok(bundle)
}

fn io_err(path: &Path, e: std::io::Error) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

fn write_outputs(cfg: &Config, bundle: &ReportBundle, dump: Option<&[u8]>) -> Result<(), RunError> {
    if let Some(p) = &cfg.output.json {
        bundle.write_json(p).map_err(|e| io_err(p, e))?;
    }
    if let Some(d) = &cfg.output.csv_dir {
        bundle.write_csv(d).map_err(|e| io_err(d, e))?;
    }
    if let (Some(p), Some(bytes)) = (&cfg.output.dump_state, dump) {
        report::write_file(p, bytes).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_flags_build_descriptors() {
        let a = SmatrixArgs { family: Some("sinh_factor".into()), b: vec![0.785], ..Default::default() };
        assert_eq!(a.descriptor().unwrap().as_deref(), Some("sinh:0.785"));
        let p = SmatrixArgs { family: Some("product".into()), b: vec![0.4, 2.2], ..Default::default() };
        assert_eq!(p.descriptor().unwrap().as_deref(), Some("product:0.4,2.2"));
        let c = SmatrixArgs { family: Some("const".into()), b: vec![-1.0], ..Default::default() };
        assert_eq!(c.descriptor().unwrap().as_deref(), Some("const:-1"));
        assert!(SmatrixArgs { family: Some("sinh".into()), ..Default::default() }.descriptor().is_err());
        assert!(SmatrixArgs { b: vec![1.0], ..Default::default() }.descriptor().is_err());
    }

    #[test]
    fn command_line_wins_over_config() {
        let cfg = Config { smatrix: Some(config::SmatrixSpec::SinhFactor { b: 0.3 }), ..Config::default() };
        let fams = resolve_families(&cfg, &SmatrixArgs::default(), &cfg.zf.families).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].descriptor(), "sinh:0.3");
        let a = SmatrixArgs { s: Some("const:-1".into()), ..Default::default() };
        assert_eq!(resolve_families(&cfg, &a, &cfg.zf.families).unwrap()[0].descriptor(), "const:-1");
    }
}
