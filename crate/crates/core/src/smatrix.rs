//! Scattering functions S(ζ) and verification of their symmetry relations
//!
//! S(ζ)⁻¹ = S(−ζ) = conj S(conj ζ) = S(ζ + iπ).
//!
//! Built-in families are the constants ±1, the sinh factor
//! S_b(ζ) = (sinh ζ − i sin b)/(sinh ζ + i sin b) and finite products of
//! sinh factors. None of them has a pole in the closed strip 0 ≤ Im ζ ≤ π
//! when b ∈ (0, π): the poles of S_b sit at −ib and i(π + b) modulo 2πi.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::{Error, Result, C64, I};

/// Default radius around a declared pole inside which evaluation is refused.
pub const DEFAULT_POLE_EXCLUSION: f64 = 1e-9;

/// Default tolerance for the symmetry-relation residuals.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-12;

/// Evaluator signature for user-supplied scattering functions.
pub type CustomEvaluator = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// The functional form of a scattering function.
#[derive(Clone)]
pub enum SKind {
    /// S ≡ c with c = ±1.
    Constant(f64),
    /// Single sinh factor S_b with real parameter b.
    SinhFactor(f64),
    /// Product of sinh factors S_{b_1}⋯S_{b_n}.
    Product(Vec<f64>),
    /// Arbitrary evaluator, used for negative tests and user experiments.
    /// The function is assumed pole-free.
    Custom { name: String, eval: CustomEvaluator },
}

/// A two-particle scattering function with pole metadata.
#[derive(Clone)]
pub struct ScatteringFunction {
    kind: SKind,
    pole_exclusion: f64,
}

impl fmt::Debug for ScatteringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScatteringFunction({})", self.descriptor())
    }
}

impl ScatteringFunction {
    /// S ≡ 1.
    pub fn one() -> Self {
        Self::from_kind(SKind::Constant(1.0))
    }

    /// S ≡ −1.
    pub fn minus_one() -> Self {
        Self::from_kind(SKind::Constant(-1.0))
    }

    /// Constant S ≡ c; only c = ±1 satisfies the symmetry relations.
    pub fn constant(c: f64) -> Self {
        Self::from_kind(SKind::Constant(c))
    }

    /// Single sinh factor S_b.
    pub fn sinh_factor(b: f64) -> Self {
        Self::from_kind(SKind::SinhFactor(b))
    }

    /// Product of sinh factors.
    pub fn product(bs: Vec<f64>) -> Self {
        Self::from_kind(SKind::Product(bs))
    }

    /// A user-supplied evaluator without declared poles.
    pub fn custom(name: impl Into<String>, eval: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        Self::from_kind(SKind::Custom { name: name.into(), eval: Arc::new(eval) })
    }

    fn from_kind(kind: SKind) -> Self {
        Self { kind, pole_exclusion: DEFAULT_POLE_EXCLUSION }
    }

    /// Returns a copy with a different pole-exclusion radius.
    pub fn with_pole_exclusion(mut self, radius: f64) -> Self {
        self.pole_exclusion = radius;
        self
    }

    /// The functional form.
    pub fn kind(&self) -> &SKind {
        &self.kind
    }

    /// Compact textual descriptor, e.g. `const:1` or `sinh:0.785`.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            SKind::Constant(c) => format!("const:{c}"),
            SKind::SinhFactor(b) => format!("sinh:{b}"),
            SKind::Product(bs) => {
                let parts: Vec<String> = bs.iter().map(|b| b.to_string()).collect();
                format!("product:{}", parts.join(","))
            }
            SKind::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    /// The sinh-factor parameters b_i (empty for constants and custom functions).
    pub fn factor_parameters(&self) -> Vec<f64> {
        match &self.kind {
            SKind::SinhFactor(b) => vec![*b],
            SKind::Product(bs) => bs.clone(),
            _ => Vec::new(),
        }
    }

    /// True for the constant function with the given value.
    pub fn is_constant(&self, c: f64) -> bool {
        matches!(self.kind, SKind::Constant(v) if v == c)
    }

    /// Declared poles of S within the band |Im ζ| ≤ 3π, as complex numbers
    /// on the imaginary axis.
    pub fn poles(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for b in self.factor_parameters() {
            for k in -2..=2 {
                let shift = 2.0 * PI * k as f64;
                out.push(C64::new(0.0, -b + shift));
                out.push(C64::new(0.0, PI + b + shift));
            }
        }
        out
    }

    /// Evaluates S(ζ), refusing points within the pole-exclusion radius of a
    /// declared pole.
    pub fn eval(&self, z: C64) -> Result<C64> {
        match &self.kind {
            SKind::Constant(c) => Ok(C64::new(*c, 0.0)),
            SKind::SinhFactor(b) => self.sinh_factor_checked(*b, z),
            SKind::Product(bs) => {
                let mut acc = C64::new(1.0, 0.0);
                for b in bs {
                    acc *= self.sinh_factor_checked(*b, z)?;
                }
                Ok(acc)
            }
            SKind::Custom { eval, .. } => Ok(eval(z)),
        }
    }

    /// Evaluates S on a real argument. Built-in families have no real poles.
    pub fn eval_real(&self, theta: f64) -> C64 {
        self.eval(C64::new(theta, 0.0)).expect("built-in scattering functions have no real poles")
    }

    /// S(0), which decides whether coinciding rapidities are allowed.
    pub fn at_zero(&self) -> C64 {
        self.eval_real(0.0)
    }

    fn sinh_factor_checked(&self, b: f64, z: C64) -> Result<C64> {
        // Poles: sinh ζ = −i sin b, i.e. ζ ∈ {−ib, i(π+b)} + 2πiℤ.
        for pole_im in [-b, PI + b] {
            let mut d = (z.im - pole_im).rem_euclid(2.0 * PI);
            if d > PI {
                d -= 2.0 * PI;
            }
            let dist = C64::new(z.re, d).norm();
            if dist < self.pole_exclusion {
                return Err(Error::PoleEvaluation {
                    at: format!("{z}"),
                    pole: format!("{}i (mod 2πi)", pole_im),
                    radius: self.pole_exclusion,
                });
            }
        }
        let s = z.sinh();
        let c = I * b.sin();
        Ok((s - c) / (s + c))
    }

    /// Exchange factor S^σ(ζ) = ∏_{i<j, σ(i)>σ(j)} S(ζ_{σ(i)} − ζ_{σ(j)}).
    pub fn exchange_factor(&self, zeta: &[C64], sigma: &[usize]) -> Result<C64> {
        let mut acc = C64::new(1.0, 0.0);
        for i in 0..sigma.len() {
            for j in i + 1..sigma.len() {
                if sigma[i] > sigma[j] {
                    acc *= self.eval(zeta[sigma[i]] - zeta[sigma[j]])?;
                }
            }
        }
        Ok(acc)
    }
}

impl FromStr for ScatteringFunction {
    type Err = Error;

    /// Parses `const:1`, `const:-1`, `sinh:B` or `product:B1,B2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("scattering function '{s}': expected KIND:PARAMS")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("scattering function '{s}': bad number '{t}'")))
        };
        match tag {
            "const" => {
                let c = num(rest)?;
                if c != 1.0 && c != -1.0 {
                    return Err(Error::InvalidParameter(format!("constant scattering function must be ±1, got {c}")));
                }
                Ok(Self::constant(c))
            }
            "sinh" | "sinh_factor" => Ok(Self::sinh_factor(num(rest)?)),
            "product" => Ok(Self::product(rest.split(',').map(num).collect::<Result<Vec<_>>>()?)),
            _ => Err(Error::InvalidParameter(format!("unknown scattering function kind '{tag}'"))),
        }
    }
}

/// Residuals of the symmetry relations over a sample set.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// Descriptor of the checked function.
    pub function: String,
    /// Number of strip samples.
    pub samples: usize,
    /// max |S(ζ)⁻¹ − S(−ζ)|.
    pub inverse_vs_reflection: f64,
    /// max |S(−ζ) − conj S(conj ζ)|.
    pub reflection_vs_conjugation: f64,
    /// max |S(ζ)⁻¹ − S(ζ + iπ)|.
    pub inverse_vs_shift: f64,
    /// max |S(θ)S(−θ) − 1| over the real parts of the samples.
    pub real_line_unitarity: f64,
    /// Tolerance applied.
    pub tolerance: f64,
    /// True when all residuals are below the tolerance.
    pub pass: bool,
}

impl SymmetryReport {
    /// Largest of the three strip residuals.
    pub fn max_residual(&self) -> f64 {
        self.inverse_vs_reflection
            .max(self.reflection_vs_conjugation)
            .max(self.inverse_vs_shift)
            .max(self.real_line_unitarity)
    }
}

/// Residual scaled by the magnitude of the compared values, so that points
/// near zeros of S (where S⁻¹ is large) are judged at relative precision.
fn scaled_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Evaluates the symmetry relations of `s` at every sample.
///
/// Samples must lie strictly inside the strip 0 < Im ζ < π. Differences are
/// absolute where the compared values are O(1) and relative where they are
/// larger (near zeros of S the inverse is large).
pub fn verify_symmetries(s: &ScatteringFunction, samples: &[C64], tolerance: f64) -> Result<SymmetryReport> {
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    let mut r3: f64 = 0.0;
    let mut r4: f64 = 0.0;
    for &z in samples {
        if !(z.im > 0.0 && z.im < PI) {
            return Err(Error::Precondition(format!("sample {z} is not inside the open strip 0 < Im ζ < π")));
        }
        let sz = s.eval(z)?;
        let inv = C64::new(1.0, 0.0) / sz;
        let refl = s.eval(-z)?;
        let conj = s.eval(z.conj())?.conj();
        let shift = s.eval(z + I * PI)?;
        r1 = r1.max(scaled_diff(inv, refl));
        r2 = r2.max(scaled_diff(refl, conj));
        r3 = r3.max(scaled_diff(inv, shift));
        let theta = C64::new(z.re, 0.0);
        r4 = r4.max((s.eval(theta)? * s.eval(-theta)? - 1.0).norm());
    }
    let report = SymmetryReport {
        function: s.descriptor(),
        samples: samples.len(),
        inverse_vs_reflection: r1,
        reflection_vs_conjugation: r2,
        inverse_vs_shift: r3,
        real_line_unitarity: r4,
        tolerance,
        pass: false,
    };
    let pass = report.max_residual() < tolerance;
    Ok(SymmetryReport { pass, ..report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::strip_samples;

    #[test]
    fn constants_evaluate_to_themselves() {
        let z = C64::new(0.3, 0.2);
        assert_eq!(ScatteringFunction::one().eval(z).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(ScatteringFunction::minus_one().eval(z).unwrap(), C64::new(-1.0, 0.0));
    }

    #[test]
    fn sinh_factor_at_zero_is_minus_one() {
        let s = ScatteringFunction::sinh_factor(PI / 4.0);
        assert!((s.eval(C64::new(0.0, 0.0)).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn sinh_factor_pole_is_refused() {
        let b = 0.7;
        let s = ScatteringFunction::sinh_factor(b);
        let r = s.eval(C64::new(0.0, -b + 1e-12));
        assert!(matches!(r, Err(Error::PoleEvaluation { .. })));
        let r = s.eval(C64::new(0.0, PI + b + 2.0 * PI));
        assert!(matches!(r, Err(Error::PoleEvaluation { .. })));
    }

    #[test]
    fn built_ins_satisfy_symmetries() {
        let samples = strip_samples(200, 3.0, 1e-3);
        for s in [
            ScatteringFunction::one(),
            ScatteringFunction::minus_one(),
            ScatteringFunction::sinh_factor(PI / 4.0),
            ScatteringFunction::product(vec![0.3, 1.1, 2.5]),
        ] {
            let rep = verify_symmetries(&s, &samples, DEFAULT_SYMMETRY_TOL).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn exponential_is_flagged() {
        let s = ScatteringFunction::custom("exp", |z: C64| z.exp());
        let rep = verify_symmetries(&s, &strip_samples(50, 2.0, 0.01), DEFAULT_SYMMETRY_TOL).unwrap();
        assert!(!rep.pass);
        assert!(rep.reflection_vs_conjugation > 0.1);
    }

    #[test]
    fn descriptor_round_trips() {
        for d in ["const:1", "const:-1", "sinh:0.785", "product:0.5,1.25"] {
            let s: ScatteringFunction = d.parse().unwrap();
            assert_eq!(s.descriptor(), d);
        }
        assert!("const:2".parse::<ScatteringFunction>().is_err());
    }

    #[test]
    fn exchange_factor_of_adjacent_swap() {
        let s = ScatteringFunction::sinh_factor(0.9);
        let z = [C64::new(0.1, 0.2), C64::new(-0.4, 0.5)];
        let f = s.exchange_factor(&z, &[1, 0]).unwrap();
        assert!((f - s.eval(z[1] - z[0]).unwrap()).norm() < 1e-15);
    }
}
