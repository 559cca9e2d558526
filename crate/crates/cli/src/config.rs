//! TOML experiment configuration.
//!
//! Every field has a default, so an empty file (or no file) reproduces the
//! acceptance parameters. The optional top-level `smatrix`, `grid`,
//! `truncation` and `testfn` entries override the corresponding per-section
//! values of whichever subcommand runs. Unknown keys are rejected so that
//! typos surface as parse errors with a line and column.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use zfqft_core::fields::TestFunction;
use zfqft_core::fockspace::RapidityGrid;
use zfqft_core::smatrix::ScatteringFunction;

/// A configuration problem, reported with exit code 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// Human-readable message, including a position when one is known.
    pub message: String,
}

impl ConfigError {
    /// Error without position information.
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A scattering function written as a TOML table.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmatrixSpec {
    /// S ≡ value with value = ±1.
    Const {
        /// The constant.
        value: f64,
    },
    /// The sinh factor with parameter b.
    SinhFactor {
        /// Pole parameter.
        b: f64,
    },
    /// A product of sinh factors.
    Product {
        /// Pole parameters of the factors.
        b: Vec<f64>,
    },
}

impl SmatrixSpec {
    /// The short descriptor accepted by `--s`.
    pub fn descriptor(&self) -> String {
        match self {
            Self::Const { value } => format!("const:{value}"),
            Self::SinhFactor { b } => format!("sinh:{b}"),
            Self::Product { b } => {
                format!("product:{}", b.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            }
        }
    }
}

/// Rapidity grid parameters.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Left end of the rapidity window.
    pub theta_min: f64,
    /// Right end of the rapidity window.
    pub theta_max: f64,
    /// Number of nodes, both ends included.
    pub n_points: usize,
    /// Particle mass.
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

fn unit_mass() -> f64 {
    1.0
}

impl GridSpec {
    const fn new(theta_min: f64, theta_max: f64, n_points: usize) -> Self {
        Self { theta_min, theta_max, n_points, mass: 1.0 }
    }

    /// Builds the grid.
    pub fn build(&self) -> zfqft_core::Result<RapidityGrid> {
        RapidityGrid::new(self.theta_min, self.theta_max, self.n_points, self.mass)
    }
}

/// Shape of a test function profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFnKind {
    /// Gaussian with the given widths.
    Gaussian,
    /// Compactly supported bump with the given radii.
    Bump,
}

/// A test function on two-dimensional Minkowski space.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TestFnSpec {
    /// Profile.
    pub kind: TestFnKind,
    /// Centre (t, x).
    pub center: [f64; 2],
    /// Widths or radii (w_t, w_x).
    pub width: [f64; 2],
    /// Optional ε-tail cutoff of a Gaussian's effective support.
    #[serde(default)]
    pub eps_tail: Option<f64>,
}

impl TestFnSpec {
    const fn gaussian(center: [f64; 2], width: [f64; 2], eps_tail: Option<f64>) -> Self {
        Self { kind: TestFnKind::Gaussian, center, width, eps_tail }
    }

    /// Builds the test function.
    pub fn build(&self) -> TestFunction {
        let f = match self.kind {
            TestFnKind::Gaussian => TestFunction::gaussian(self.center, self.width),
            TestFnKind::Bump => TestFunction::bump(self.center, self.width),
        };
        match self.eps_tail {
            Some(eps) => f.with_eps_tail(eps),
            None => f,
        }
    }
}

/// Symmetry-relation sampling.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetrySection {
    /// Scattering functions checked when none is given on the command line.
    pub families: Vec<String>,
    /// Number of Halton points in the strip.
    pub samples: usize,
    /// Real half-width of the sampled rectangle.
    pub re_half_width: f64,
    /// Distance kept from the strip boundary.
    pub margin: f64,
}

impl Default for SymmetrySection {
    fn default() -> Self {
        Self { families: default_families(), samples: 200, re_half_width: 3.0, margin: 1e-3 }
    }
}

/// Zamolodchikov-Faddeev relation sampling.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZfSection {
    /// Scattering functions checked when none is given on the command line.
    pub families: Vec<String>,
    /// Rapidity grid.
    pub grid: GridSpec,
    /// Particle-number truncation N_max.
    pub truncation: usize,
    /// Random test vectors per relation.
    pub samples: usize,
}

impl Default for ZfSection {
    fn default() -> Self {
        Self { families: default_families(), grid: GridSpec::new(-2.0, 2.0, 16), truncation: 3, samples: 8 }
    }
}

/// Wedge-locality decay measurement.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalitySection {
    /// Scattering functions used with the φ/φ̂ pair when none is given on the
    /// command line. For S ≡ −1 the Majorana pairs are measured as well.
    pub families: Vec<String>,
    /// Rapidity grid.
    pub grid: GridSpec,
    /// Particle-number truncation N_max.
    pub truncation: usize,
    /// Left test function f.
    pub f: TestFnSpec,
    /// Right test function g for the φ/φ̂ pair.
    pub g: TestFnSpec,
    /// Right test function for the Majorana pairs.
    pub majorana_g: TestFnSpec,
    /// Spacelike separations, increasing.
    pub separations: Vec<f64>,
}

impl Default for LocalitySection {
    fn default() -> Self {
        Self {
            families: vec!["const:1".into(), "sinh:1".into(), "const:-1".into()],
            grid: GridSpec::new(-2.5, 2.5, 32),
            truncation: 3,
            f: TestFnSpec::gaussian([0.0, 0.0], [0.5, 0.5], Some(1e-4)),
            g: TestFnSpec::gaussian([0.5, 0.0], [0.5, 0.5], Some(1e-4)),
            majorana_g: TestFnSpec::gaussian([0.0, 0.0], [0.5, 0.5], Some(1e-4)),
            separations: vec![0.0, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

/// Scattering experiments: S-matrix elements, statistics and generators.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterSection {
    /// Scattering functions used when none is given on the command line.
    pub families: Vec<String>,
    /// Rapidity grid for the S-matrix elements.
    pub grid: GridSpec,
    /// Particle-number truncation N_max.
    pub truncation: usize,
    /// Packet centres for two particles; other counts spread them evenly
    /// over the same interval.
    pub centers: [f64; 2],
    /// Rapidity half-width of each packet.
    pub half_width: f64,
    /// Rapidity plateau of the χ filter.
    pub chi_plateau: [f64; 2],
    /// Small grid for the generator identities.
    pub pfg_grid: GridSpec,
    /// Packet centre and half-width of the generator wave function.
    pub pfg_packet: [f64; 2],
    /// χ plateau for the generator identity.
    pub pfg_chi_plateau: [f64; 2],
    /// Scattering function of the τ-independence check.
    pub tau_smatrix: String,
    /// Generator packet (centre, half-width) for the τ check.
    pub tau_packet: [f64; 2],
    /// Smearing packet (centre, half-width) for the τ check.
    pub tau_smearing: [f64; 2],
    /// Times compared with τ = 0.
    pub taus: Vec<f64>,
    /// Half-length of the spatial sampling window.
    pub x_half_length: f64,
    /// Spacing of the spatial sampling.
    pub x_step: f64,
}

impl Default for ScatterSection {
    fn default() -> Self {
        Self {
            families: default_families(),
            grid: GridSpec::new(-63.0 / 96.0, 63.0 / 96.0, 64),
            truncation: 3,
            centers: [-0.5, 0.5],
            half_width: 0.12,
            chi_plateau: [-1.0, 1.0],
            pfg_grid: GridSpec::new(-1.5, 1.5, 9),
            pfg_packet: [0.1, 0.8],
            pfg_chi_plateau: [-0.8, 0.8],
            tau_smatrix: "sinh:0.9".into(),
            tau_packet: [0.0, 0.9],
            tau_smearing: [0.1, 1.0],
            taus: vec![1.0, 5.0, 25.0],
            x_half_length: 220.0,
            x_step: 0.5,
        }
    }
}

/// Form factor verification.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormFactorSection {
    /// Built-in family checked against the double-cone axioms.
    pub family: String,
    /// Test function of that family.
    pub g: TestFnSpec,
    /// Highest particle number checked.
    pub k_max: usize,
    /// Test function of the free Majorana boundary-value comparison.
    pub boundary_f: TestFnSpec,
    /// Grid of the boundary-value comparison.
    pub boundary_grid: GridSpec,
    /// Largest m + n compared.
    pub boundary_order: usize,
}

impl Default for FormFactorSection {
    fn default() -> Self {
        Self {
            family: "ising-fermion-g".into(),
            g: TestFnSpec { kind: TestFnKind::Bump, center: [0.0, 0.0], width: [0.4, 0.4], eps_tail: None },
            k_max: 3,
            boundary_f: TestFnSpec::gaussian([0.2, 0.1], [0.5, 0.6], None),
            boundary_grid: GridSpec::new(-1.5, 1.5, 5),
            boundary_order: 2,
        }
    }
}

/// Finite CAR model sizes.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarSection {
    /// Symmetric sizes n_left = n_right = n checked when no size is given on
    /// the command line.
    pub sizes: Vec<usize>,
}

impl Default for CarSection {
    fn default() -> Self {
        Self { sizes: vec![1, 2] }
    }
}

/// Pass thresholds. Residuals must stay below their tolerance, except
/// `locality_ratio`, which the decay ratio must reach.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Zamolodchikov-Faddeev relations.
    pub zf: f64,
    /// Symmetry relations of S.
    pub symmetry: f64,
    /// Required ratio between the first and last locality measurement.
    pub locality_ratio: f64,
    /// Relative error of smeared S-matrix elements.
    pub scatter: f64,
    /// Two-body phase against −S at the packet centres.
    pub phase: f64,
    /// Phase of the constant scattering functions, which is exact.
    pub exact_phase: f64,
    /// Graded exchange antisymmetry.
    pub exchange: f64,
    /// ‖P_Γψ‖² = ‖ψ‖²/n!.
    pub projector_norm: f64,
    /// Generator identity A^χ = A.
    pub pfg: f64,
    /// τ-independence of the smeared generator.
    pub tau: f64,
    /// Form factor symmetry, periodicity and analyticity residuals.
    pub ff_exact: f64,
    /// Form factor residue relation at the highest order.
    pub ff_residue: f64,
    /// Boundary values against extracted coefficients.
    pub ff_boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zf: 1e-10,
            symmetry: 1e-12,
            locality_ratio: 1e3,
            scatter: 5e-3,
            phase: 5e-3,
            exact_phase: 1e-12,
            exchange: 1e-8,
            projector_norm: 1e-10,
            pfg: 1e-10,
            tau: 1e-8,
            ff_exact: 1e-9,
            ff_residue: 1e-6,
            ff_boundary: 1e-8,
        }
    }
}

impl Tolerances {
    /// Sets one tolerance by key, as in `--tol-override zf=1e-9`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let mut table = serde_json::to_value(&*self).expect("tolerances serialize");
        let map = table.as_object_mut().expect("tolerances are a table");
        if !map.contains_key(key) {
            let known: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(ConfigError::new(format!("unknown tolerance '{key}' (known: {})", known.join(", "))));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(ConfigError::new(format!("tolerance '{key}' must be positive and finite, got {value}")));
        }
        map.insert(key.to_owned(), serde_json::json!(value));
        *self = serde_json::from_value(table).expect("tolerance table round-trips");
        Ok(())
    }

    /// Applies `KEY=VAL` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), ConfigError> {
        for item in overrides {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("tolerance override '{item}': expected KEY=VAL")))?;
            let value = val
                .trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::new(format!("tolerance override '{item}': bad number '{val}'")))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }
}

/// Output locations.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// JSON report path.
    pub json: Option<PathBuf>,
    /// Directory for plot-ready CSV tables.
    pub csv_dir: Option<PathBuf>,
    /// Binary dump of the outgoing scattering state.
    pub dump_state: Option<PathBuf>,
}

/// The full experiment configuration.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seed of every random stream.
    pub seed: u64,
    /// Scattering function overriding the per-section family lists.
    pub smatrix: Option<SmatrixSpec>,
    /// Rapidity grid overriding the per-section grids.
    pub grid: Option<GridSpec>,
    /// Truncation overriding the per-section truncations.
    pub truncation: Option<usize>,
    /// Test function overriding the locality f and the form factor g.
    pub testfn: Option<TestFnSpec>,
    /// Accept scattering functions with poles on the strip boundary.
    pub allow_boundary_poles: bool,
    /// Symmetry relations.
    pub symmetry: SymmetrySection,
    /// Zamolodchikov-Faddeev relations.
    pub zf: ZfSection,
    /// Wedge locality.
    pub locality: LocalitySection,
    /// Scattering.
    pub scatter: ScatterSection,
    /// Form factors.
    pub formfactors: FormFactorSection,
    /// Finite CAR model.
    pub car: CarSection,
    /// Pass thresholds.
    pub tolerances: Tolerances,
    /// Output locations. They do not influence results and are left out of
    /// the echoed configuration so that reports written to different paths
    /// stay byte-identical.
    #[serde(skip_serializing)]
    pub output: OutputSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 7,
            smatrix: None,
            grid: None,
            truncation: None,
            testfn: None,
            allow_boundary_poles: false,
            symmetry: SymmetrySection::default(),
            zf: ZfSection::default(),
            locality: LocalitySection::default(),
            scatter: ScatterSection::default(),
            formfactors: FormFactorSection::default(),
            car: CarSection::default(),
            tolerances: Tolerances::default(),
            output: OutputSection::default(),
        }
    }
}

fn default_families() -> Vec<String> {
    vec!["const:1".into(), "const:-1".into(), format!("sinh:{FRAC_PI_4}"), "product:0.4,2.2".into()]
}

/// One-based line and column of a byte offset.
pub fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Config {
    /// Parses TOML text; `origin` names the source in error messages.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_owned();
            match e.span() {
                Some(span) => {
                    let (line, column) = line_column(text, span.start);
                    ConfigError::new(format!("{origin}:{line}:{column}: {msg}"))
                }
                None => ConfigError::new(format!("{origin}: {msg}")),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Checks the values serde cannot: descriptors, grids and sizes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let lists = [
            ("symmetry.families", &self.symmetry.families),
            ("zf.families", &self.zf.families),
            ("locality.families", &self.locality.families),
            ("scatter.families", &self.scatter.families),
        ];
        for (key, list) in lists {
            if list.is_empty() {
                return Err(ConfigError::new(format!("{key} must not be empty")));
            }
            for d in list {
                parse_smatrix(d).map_err(|e| ConfigError::new(format!("{key}: {}", e.message)))?;
            }
        }
        parse_smatrix(&self.scatter.tau_smatrix).map_err(|e| ConfigError::new(format!("scatter.tau_smatrix: {}", e.message)))?;
        if let Some(s) = &self.smatrix {
            parse_smatrix(&s.descriptor()).map_err(|e| ConfigError::new(format!("smatrix: {}", e.message)))?;
        }
        let grids = [
            ("grid", self.grid),
            ("zf.grid", Some(self.zf.grid)),
            ("locality.grid", Some(self.locality.grid)),
            ("scatter.grid", Some(self.scatter.grid)),
            ("scatter.pfg_grid", Some(self.scatter.pfg_grid)),
            ("formfactors.boundary_grid", Some(self.formfactors.boundary_grid)),
        ];
        for (key, g) in grids {
            if let Some(g) = g {
                g.build().map_err(|e| ConfigError::new(format!("{key}: {e}")))?;
            }
        }
        if self.car.sizes.is_empty() {
            return Err(ConfigError::new("car.sizes must not be empty"));
        }
        if self.locality.separations.len() < 2 {
            return Err(ConfigError::new("locality.separations needs at least two entries"));
        }
        Ok(())
    }
}

/// Parses a scattering function descriptor such as `sinh:0.785`.
pub fn parse_smatrix(desc: &str) -> Result<ScatteringFunction, ConfigError> {
    desc.parse::<ScatteringFunction>().map_err(|e| ConfigError::new(format!("'{desc}': {e}")))
}

/// Poles of S in the closed physical strip 0 ≤ Im ζ ≤ π, split into
/// boundary poles (Im ζ ∈ {0, π}) and interior poles.
pub fn strip_poles(s: &ScatteringFunction) -> (Vec<f64>, Vec<f64>) {
    const EDGE: f64 = 1e-12;
    let pi = std::f64::consts::PI;
    let mut boundary = Vec::new();
    let mut interior = Vec::new();
    for p in s.poles() {
        let y = p.im;
        if y.abs() <= EDGE || (y - pi).abs() <= EDGE {
            boundary.push(y);
        } else if y > 0.0 && y < pi {
            interior.push(y);
        }
    }
    (boundary, interior)
}

/// Rejects scattering functions with poles in the closed strip. Boundary poles
/// are accepted when `allow_boundary` is set.
pub fn check_strip(s: &ScatteringFunction, allow_boundary: bool) -> Result<(), ConfigError> {
    let (boundary, interior) = strip_poles(s);
    if !interior.is_empty() {
        return Err(ConfigError::new(format!(
            "{} has poles inside the physical strip at Im ζ = {interior:?}",
            s.descriptor()
        )));
    }
    if !boundary.is_empty() && !allow_boundary {
        return Err(ConfigError::new(format!(
            "{} has poles on the strip boundary at Im ζ = {boundary:?}; pass --allow-boundary-poles to accept it",
            s.descriptor()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        assert_eq!(Config::from_toml("", "t").unwrap(), Config::default());
    }

    #[test]
    fn positions_are_one_based() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.apply_overrides(&["zf=1e-9".into(), " phase = 0.1".into()]).unwrap();
        assert_eq!(t.zf, 1e-9);
        assert_eq!(t.phase, 0.1);
        assert!(t.apply_overrides(&["nope=1".into()]).is_err());
        assert!(t.apply_overrides(&["zf".into()]).is_err());
        assert!(t.apply_overrides(&["zf=-1".into()]).is_err());
    }

    #[test]
    fn strip_pole_classification() {
        assert!(check_strip(&ScatteringFunction::sinh_factor(0.7), false).is_ok());
        assert!(check_strip(&ScatteringFunction::sinh_factor(0.0), false).is_err());
        assert!(check_strip(&ScatteringFunction::sinh_factor(0.0), true).is_ok());
        assert!(check_strip(&ScatteringFunction::sinh_factor(-0.5), true).is_err());
    }
}
