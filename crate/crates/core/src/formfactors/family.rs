//! Form factor families F = (F_k) and the indicatrix ω.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::fields::{Sign, TestFunction};
use crate::fockspace::tensor::{factorial, permutations};
use crate::smatrix::ScatteringFunction;
use crate::{Error, Result, C64};

/// The indicatrix ω(t) = ℓ log(1 + t) controlling the admissible growth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Indicatrix {
    /// The prefactor ℓ ≥ 0.
    pub ell: f64,
}

impl Default for Indicatrix {
    fn default() -> Self {
        Self { ell: 1.0 }
    }
}

impl Indicatrix {
    /// Indicatrix with prefactor ℓ.
    pub fn new(ell: f64) -> Result<Self> {
        if !(ell >= 0.0 && ell.is_finite()) {
            return Err(Error::InvalidParameter(format!("indicatrix prefactor must be ≥ 0, got {ell}")));
        }
        Ok(Self { ell })
    }

    /// ω(t).
    pub fn eval(&self, t: f64) -> f64 {
        self.ell * t.ln_1p()
    }

    /// Largest sampled excess ω(s+t) − ω(s) − ω(t) over a log-spaced grid.
    /// Non-positive values mean subadditivity holds without a constant.
    pub fn subadditivity_excess(&self) -> f64 {
        let pts: Vec<f64> = (0..=40).map(|j| 10f64.powf(-3.0 + 0.25 * j as f64)).collect();
        pts.iter()
            .flat_map(|&s| pts.iter().map(move |&t| (s, t)))
            .map(|(s, t)| self.eval(s + t) - self.eval(s) - self.eval(t))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The ratios ω(t)/t at t = 10^j, j = 1..=`decades`, which must tend to 0.
    pub fn sublinear_ratios(&self, decades: u32) -> Vec<f64> {
        (1..=decades as i32).map(|j| 10f64.powi(j)).map(|t| self.eval(t) / t).collect()
    }
}

/// p(ζ) = μ(cosh ζ, sinh ζ) at complex rapidity.
pub fn complex_momentum(mass: f64, zeta: C64) -> [C64; 2] {
    [zeta.cosh() * mass, zeta.sinh() * mass]
}

/// Total momentum Σ_j p(ζ_j).
pub fn total_momentum(mass: f64, zeta: &[C64]) -> [C64; 2] {
    zeta.iter().fold([C64::new(0.0, 0.0); 2], |acc, &z| {
        let p = complex_momentum(mass, z);
        [acc[0] + p[0], acc[1] + p[1]]
    })
}

/// Evaluator signature of a custom family: (k, ζ) ↦ F_k(ζ).
pub type Evaluator = Arc<dyn Fn(usize, &[C64]) -> Result<C64> + Send + Sync>;

/// The concrete family behind a [`FormFactorFamily`].
#[derive(Clone)]
pub enum FamilyKind {
    /// The S = 1 family with odd F_{2k+1} built from g̃(p(ζ)), sech factors and e^{∓ζ/2}.
    IsingFermion {
        /// The localizing test function g.
        g: TestFunction,
        /// `Minus` selects e^{−ζ/2}, `Plus` selects e^{+ζ/2}.
        sign: Sign,
    },
    /// The free Majorana field ψ±(f) at S = −1: F_1 = c± e^{±ζ/2} f̃(p(ζ)), higher F_k = 0.
    FreeMajorana {
        /// The test function f.
        f: TestFunction,
        /// The chirality ±.
        component: Sign,
    },
    /// F_0 = c and F_k = 0 otherwise.
    Constant(C64),
    /// The wedge field φ(g): F_1 = g̃∘p and F_k = 0 otherwise.
    Field(TestFunction),
    /// User supplied evaluator.
    Custom(Evaluator),
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::IsingFermion { g, sign } => f.debug_struct("IsingFermion").field("g", g).field("sign", sign).finish(),
            FamilyKind::FreeMajorana { f: tf, component } => {
                f.debug_struct("FreeMajorana").field("f", tf).field("component", component).finish()
            }
            FamilyKind::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            FamilyKind::Field(g) => f.debug_tuple("Field").field(g).finish(),
            FamilyKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A sequence of functions F_k on ℂ^k together with the data needed to
/// check the wedge and double-cone axioms.
#[derive(Clone, Debug)]
pub struct FormFactorFamily {
    name: String,
    kind: FamilyKind,
    s: ScatteringFunction,
    mass: f64,
    radius: f64,
    indicatrix: Indicatrix,
    poles: bool,
}

impl FormFactorFamily {
    /// The explicit S = 1 family with the e^{∓ζ/2} choice given by `sign`.
    pub fn ising_fermion(g: TestFunction, sign: Sign, mass: f64) -> Self {
        let radius = localization_radius(&g);
        Self {
            name: format!("ising-fermion-g{}", sign_suffix(sign)),
            kind: FamilyKind::IsingFermion { g, sign },
            s: ScatteringFunction::one(),
            mass,
            radius,
            indicatrix: Indicatrix::default(),
            poles: true,
        }
    }

    /// The free Majorana field ψ±(f) at S = −1.
    pub fn free_majorana(f: TestFunction, component: Sign, mass: f64) -> Self {
        let radius = localization_radius(&f);
        Self {
            name: format!("free-majorana{}", sign_suffix(component)),
            kind: FamilyKind::FreeMajorana { f, component },
            s: ScatteringFunction::minus_one(),
            mass,
            radius,
            indicatrix: Indicatrix::default(),
            poles: false,
        }
    }

    /// F_0 = c, all higher F_k = 0, attached to the scattering function `s`.
    pub fn constant(c: C64, s: ScatteringFunction, mass: f64) -> Self {
        Self {
            name: "constant".into(),
            kind: FamilyKind::Constant(c),
            s,
            mass,
            radius: 0.0,
            indicatrix: Indicatrix::default(),
            poles: false,
        }
    }

    /// The family of the wedge field φ(g) for the scattering function `s`.
    pub fn field(g: TestFunction, s: ScatteringFunction, mass: f64) -> Self {
        let radius = localization_radius(&g);
        Self {
            name: "field".into(),
            kind: FamilyKind::Field(g),
            s,
            mass,
            radius,
            indicatrix: Indicatrix::default(),
            poles: false,
        }
    }

    /// A custom family. `poles` declares first order poles at
    /// ζ_b − ζ_a ∈ iπ(2ℤ+1) for every pair a ≠ b.
    pub fn custom(
        name: impl Into<String>,
        s: ScatteringFunction,
        mass: f64,
        radius: f64,
        poles: bool,
        eval: impl Fn(usize, &[C64]) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: FamilyKind::Custom(Arc::new(eval)),
            s,
            mass,
            radius,
            indicatrix: Indicatrix::default(),
            poles,
        }
    }

    /// Builds a built-in family by name: `ising-fermion-g` (requires `g`, the
    /// sign picks e^{∓ζ/2}), `free-majorana` (requires `g` as the test
    /// function, the sign picks the chirality) or `constant` (value `c`, S = 1).
    pub fn builtin(name: &str, g: Option<TestFunction>, sign: Sign, c: C64, mass: f64) -> Result<Self> {
        let need = |g: Option<TestFunction>| {
            g.ok_or_else(|| Error::InvalidParameter(format!("family '{name}' needs a test function")))
        };
        match name {
            "ising-fermion-g" => Ok(Self::ising_fermion(need(g)?, sign, mass)),
            "free-majorana" => Ok(Self::free_majorana(need(g)?, sign, mass)),
            "constant" => Ok(Self::constant(c, ScatteringFunction::one(), mass)),
            _ => Err(Error::InvalidParameter(format!("unknown form factor family '{name}'"))),
        }
    }

    /// Replaces the indicatrix.
    pub fn with_indicatrix(mut self, indicatrix: Indicatrix) -> Self {
        self.indicatrix = indicatrix;
        self
    }

    /// Replaces the associated scattering function, e.g. to build a family
    /// that deliberately violates the exchange relation.
    pub fn with_scattering_function(mut self, s: ScatteringFunction) -> Self {
        self.s = s;
        self
    }

    /// Descriptive name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The concrete family.
    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// The associated scattering function.
    pub fn s(&self) -> &ScatteringFunction {
        &self.s
    }

    /// Particle mass μ.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Localization radius r.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The indicatrix.
    pub fn indicatrix(&self) -> Indicatrix {
        self.indicatrix
    }

    /// Whether first order poles at ζ_b − ζ_a ∈ iπ(2ℤ+1) are declared.
    pub fn declares_poles(&self) -> bool {
        self.poles
    }

    /// Distance of ζ from the nearest declared pole hyperplane, skipping the
    /// unordered pair `skip`.
    pub fn pole_distance(&self, zeta: &[C64], skip: Option<(usize, usize)>) -> f64 {
        if !self.poles {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for a in 0..zeta.len() {
            for b in a + 1..zeta.len() {
                if skip.is_some_and(|(m, n)| (m.min(n), m.max(n)) == (a, b)) {
                    continue;
                }
                let d = zeta[b] - zeta[a];
                // Nearest point of iπ(2ℤ+1).
                let j = ((d.im / PI - 1.0) / 2.0).round();
                let pole = C64::new(0.0, PI * (2.0 * j + 1.0));
                best = best.min((d - pole).norm());
            }
        }
        best
    }

    /// F_k(ζ) with k = ζ.len().
    pub fn eval(&self, zeta: &[C64]) -> Result<C64> {
        let k = zeta.len();
        let zero = C64::new(0.0, 0.0);
        let value = match &self.kind {
            FamilyKind::Constant(c) => Ok(if k == 0 { *c } else { zero }),
            FamilyKind::Field(g) => {
                if k != 1 {
                    return Ok(zero);
                }
                g.fourier_complex(complex_momentum(self.mass, zeta[0]))
            }
            FamilyKind::FreeMajorana { f, component } => {
                if k != 1 {
                    return Ok(zero);
                }
                let s = component.value();
                let phase = C64::from_polar(1.0, PI * (-2.0 + s) / 4.0);
                Ok(phase * (zeta[0] * (s / 2.0)).exp() * f.fourier_complex(complex_momentum(self.mass, zeta[0]))?)
            }
            FamilyKind::IsingFermion { g, sign } => {
                if k % 2 == 0 {
                    return Ok(zero);
                }
                let half = k / 2;
                let pref = (if half % 2 == 0 { 1.0 } else { -1.0 }) / ((4.0 * PI).powi(half as i32) * factorial(half));
                let gt = g.fourier_complex(total_momentum(self.mass, zeta))?;
                // e^{∓ζ/2}: the Minus choice is e^{−ζ/2}.
                let e = sign.value() / 2.0;
                let mut sum = zero;
                for sigma in permutations(k) {
                    let mut term = (zeta[sigma[0]] * e).exp();
                    for i in 0..half {
                        term /= ((zeta[sigma[2 * i + 1]] - zeta[sigma[2 * i + 2]]) * 0.5).cosh();
                    }
                    sum += term;
                }
                Ok(gt * sum * pref)
            }
            FamilyKind::Custom(f) => f(k, zeta),
        };
        value.and_then(|v| self.finite(zeta, v))
    }

    fn finite(&self, zeta: &[C64], v: C64) -> Result<C64> {
        if v.is_finite() {
            Ok(v)
        } else if self.pole_distance(zeta, None) < 1e-8 {
            Err(Error::PoleEvaluation { at: format!("{zeta:?}"), pole: "declared pole of F_k".into(), radius: 1e-8 })
        } else {
            Err(Error::Precondition(format!("F_{} overflows at {zeta:?}", zeta.len())))
        }
    }

    /// Σ over pole pairs of ln min(1, distance to the pair's pole set), the
    /// log of the factor that removes first order pole singularities.
    pub fn log_pole_factor(&self, zeta: &[C64]) -> f64 {
        if !self.poles {
            return 0.0;
        }
        let mut acc = 0.0;
        for a in 0..zeta.len() {
            for b in a + 1..zeta.len() {
                acc += self.pole_distance(&[zeta[a], zeta[b]], None).min(1.0).ln();
            }
        }
        acc
    }
}

/// Radius r of a double cone around the origin containing the support, so
/// that |g̃(p)| ≤ c e^{r |Im p¹|} on the complex mass shell.
fn localization_radius(g: &TestFunction) -> f64 {
    g.double_cone_radius() + g.center[0].abs() + g.center[1].abs()
}

fn sign_suffix(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}
