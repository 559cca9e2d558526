//! Test functions, wedge-local fields and graded locality measurements.
//!
//! The left field is φ(f) = z†(f⁺) + z(f⁻) with f^±(θ) = f̃(±p(θ)). The right
//! field is φ′(f) = J φ(j.f) J with (j.f)(x) = f(−x), and the twisted right
//! field is φ̂(f) = Z φ′(f) Z* = iΓφ′(f). For S = −1 the Majorana components
//! ψ±(f) = z†(a±) + z(conj a±) with a±(θ) = e^{iπ(−2±1)/4} e^{±θ/2} f̃(p(θ))
//! are available as well.
//!
//! Field operators are matrix-free ([`Field`] implements [`FockMap`]); dense
//! matrices are produced on demand with [`Field::dense`].

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::fockspace::{map_norm, FockBasis, FockMap, FockOperator, FockSpace, FockState, Grade, RapidityGrid};
use crate::quad::{integrate, QuadOptions};
use crate::{Error, Result, C64, I};

/// Default tail threshold defining the effective support of a Gaussian.
pub const DEFAULT_EPS_TAIL: f64 = 1e-8;

/// Shape of a test function.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// exp(−(x⁰−c⁰)²/(2w_t²) − (x¹−c¹)²/(2w_x²)).
    Gaussian { width: [f64; 2] },
    /// b((x⁰−c⁰)/R_t) b((x¹−c¹)/R_x) with b(u) = exp(−1/(1−u²)) on |u| < 1.
    Bump { radius: [f64; 2] },
}

/// A real test function on two-dimensional Minkowski space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunction {
    /// Shape parameters.
    pub profile: Profile,
    /// Centre (t, x).
    pub center: [f64; 2],
    /// Tail threshold used for the effective support of Gaussians.
    pub eps_tail: f64,
}

/// One-dimensional bump b(u) = exp(−1/(1−u²)).
pub fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// ∫_{−1}^{1} b(u) e^{iku} du for complex k (b is even, so this is ∫ b cos(ku)).
pub fn bump_transform(k: C64) -> Result<C64> {
    // |cos(ku)| ≤ cosh(Im k), so the rounding floor of the sum grows with it
    // even when the integral itself cancels.
    let opts = QuadOptions { abs_tol: 1e-15 * k.im.abs().cosh(), rel_tol: 1e-13, max_intervals: 2000 };
    integrate(|u| (k * u).cos() * bump(u), -1.0, 1.0, opts)
}

impl TestFunction {
    /// Gaussian with the given centre and widths (w_t, w_x).
    pub fn gaussian(center: [f64; 2], width: [f64; 2]) -> Self {
        Self { profile: Profile::Gaussian { width }, center, eps_tail: DEFAULT_EPS_TAIL }
    }

    /// Product bump supported in the box |t−c⁰| < R_t, |x−c¹| < R_x.
    pub fn bump(center: [f64; 2], radius: [f64; 2]) -> Self {
        Self { profile: Profile::Bump { radius }, center, eps_tail: DEFAULT_EPS_TAIL }
    }

    /// Copy with a different tail threshold.
    pub fn with_eps_tail(mut self, eps: f64) -> Self {
        self.eps_tail = eps;
        self
    }

    /// Value at a spacetime point.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let (u, v) = (x[0] - self.center[0], x[1] - self.center[1]);
        match self.profile {
            Profile::Gaussian { width } => (-(u * u) / (2.0 * width[0] * width[0]) - (v * v) / (2.0 * width[1] * width[1])).exp(),
            Profile::Bump { radius } => bump(u / radius[0]) * bump(v / radius[1]),
        }
    }

    /// f̃(p) = (2π)⁻¹ ∫ f(x) e^{ip·x} d²x at a complex momentum.
    pub fn fourier_complex(&self, p: [C64; 2]) -> Result<C64> {
        let phase = (I * (p[0] * self.center[0] - p[1] * self.center[1])).exp();
        match self.profile {
            Profile::Gaussian { width } => {
                let (wt, wx) = (width[0], width[1]);
                Ok(phase * wt * wx * (-(p[0] * p[0] * wt * wt + p[1] * p[1] * wx * wx) * 0.5).exp())
            }
            Profile::Bump { radius } => {
                let (rt, rx) = (radius[0], radius[1]);
                let bt = bump_transform(p[0] * rt)?;
                let bx = bump_transform(-p[1] * rx)?;
                Ok(phase * rt * rx * bt * bx / (2.0 * PI))
            }
        }
    }

    /// f̃(p) at a real momentum.
    pub fn fourier(&self, p: [f64; 2]) -> C64 {
        self.fourier_complex([C64::new(p[0], 0.0), C64::new(p[1], 0.0)])
            .expect("bump transform converges at real momenta")
    }

    /// The translate x ↦ f(x − a).
    pub fn translated(&self, a: [f64; 2]) -> Self {
        Self { center: [self.center[0] + a[0], self.center[1] + a[1]], ..self.clone() }
    }

    /// The reflection j.f: x ↦ f(−x).
    pub fn reflected(&self) -> Self {
        Self { center: [-self.center[0], -self.center[1]], ..self.clone() }
    }

    /// Radius of a disc around the centre containing the (effective) support.
    pub fn support_radius(&self) -> f64 {
        match self.profile {
            Profile::Gaussian { width } => width[0].max(width[1]) * (2.0 * (1.0 / self.eps_tail).ln()).sqrt(),
            Profile::Bump { radius } => radius[0].hypot(radius[1]),
        }
    }

    /// Radius of the smallest double cone |t−c⁰| + |x−c¹| < r around the
    /// centre containing the support (effective support for Gaussians).
    pub fn double_cone_radius(&self) -> f64 {
        match self.profile {
            Profile::Gaussian { .. } => self.support_radius() * std::f64::consts::SQRT_2,
            Profile::Bump { radius } => radius[0] + radius[1],
        }
    }
}

/// True when the support disc of `left` lies in a left wedge and that of
/// `right` in the right wedge with the same apex, i.e. Δ¹ − |Δ⁰| > √2 (r_f + r_g)
/// for Δ = c_g − c_f.
pub fn wedge_separated(left: &TestFunction, right: &TestFunction) -> bool {
    let d0 = right.center[0] - left.center[0];
    let d1 = right.center[1] - left.center[1];
    d1 - d0.abs() > std::f64::consts::SQRT_2 * (left.support_radius() + right.support_radius())
}

/// Sign selector for mass-shell restrictions and Majorana components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    /// +
    Plus,
    /// −
    Minus,
}

impl Sign {
    /// ±1.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The grid vector θ ↦ f̃(±p(θ)).
pub fn mass_shell_restrict(grid: &RapidityGrid, f: &TestFunction, sign: Sign) -> Vec<C64> {
    let s = sign.value();
    (0..grid.len())
        .map(|k| {
            let p = grid.momentum(k);
            f.fourier([s * p[0], s * p[1]])
        })
        .collect()
}

/// Majorana amplitude a±(θ) = e^{iπ(−2±1)/4} e^{±θ/2} f̃(p(θ)).
pub fn majorana_amplitude(grid: &RapidityGrid, f: &TestFunction, component: Sign) -> Vec<C64> {
    let s = component.value();
    let phase = C64::from_polar(1.0, PI * (-2.0 + s) / 4.0);
    mass_shell_restrict(grid, f, Sign::Plus)
        .into_iter()
        .enumerate()
        .map(|(k, v)| phase * (s * grid.node(k) / 2.0).exp() * v)
        .collect()
}

/// Which field a [`Field`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    /// φ(f).
    Left,
    /// φ′(f) = Jφ(j.f)J.
    Right,
    /// φ̂(f) = Zφ′(f)Z*.
    TwistedRight,
    /// ψ±(f), S = −1 only.
    Majorana(Sign),
}

/// A matrix-free field operator z†(c) + z(a), possibly conjugated by J and Z.
#[derive(Clone, Debug)]
pub struct Field {
    space: FockSpace,
    kind: FieldKind,
    creation: Vec<C64>,
    annihilation: Vec<C64>,
}

/// The left field φ(f).
pub fn phi(space: &FockSpace, f: &TestFunction) -> Field {
    let g = space.grid();
    Field {
        space: space.clone(),
        kind: FieldKind::Left,
        creation: mass_shell_restrict(g, f, Sign::Plus),
        annihilation: mass_shell_restrict(g, f, Sign::Minus),
    }
}

/// The right field φ′(f) = J φ(j.f) J.
pub fn phi_prime(space: &FockSpace, f: &TestFunction) -> Field {
    let inner = phi(space, &f.reflected());
    Field { kind: FieldKind::Right, ..inner }
}

/// The twisted right field φ̂(f) = Z φ′(f) Z*.
pub fn phi_hat(space: &FockSpace, f: &TestFunction) -> Field {
    let inner = phi(space, &f.reflected());
    Field { kind: FieldKind::TwistedRight, ..inner }
}

/// The Majorana component ψ±(f); requires S ≡ −1.
pub fn majorana(space: &FockSpace, f: &TestFunction, component: Sign) -> Result<Field> {
    if !space.s().is_constant(-1.0) {
        return Err(Error::WrongScatteringFunction(format!(
            "Majorana fields need S ≡ −1, got {}",
            space.s().descriptor()
        )));
    }
    let a = majorana_amplitude(space.grid(), f, component);
    let conj = a.iter().map(|x| x.conj()).collect();
    Ok(Field { space: space.clone(), kind: FieldKind::Majorana(component), creation: a, annihilation: conj })
}

impl Field {
    /// Which field this is.
    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// The creation amplitude (before any J/Z conjugation).
    pub fn creation_amplitude(&self) -> &[C64] {
        &self.creation
    }

    /// The annihilation amplitude (before any J/Z conjugation).
    pub fn annihilation_amplitude(&self) -> &[C64] {
        &self.annihilation
    }

    fn apply_bare(&self, s: &FockState) -> FockState {
        let a = self.space.zf_create(&self.creation, s).expect("shapes fixed at construction");
        let b = self.space.zf_annihilate(&self.annihilation, s).expect("shapes fixed at construction");
        &a + &b
    }

    /// Applies the field to a state.
    pub fn apply(&self, s: &FockState) -> FockState {
        let sp = &self.space;
        match self.kind {
            FieldKind::Left | FieldKind::Majorana(_) => self.apply_bare(s),
            FieldKind::Right => sp.apply_reflection(&self.apply_bare(&sp.apply_reflection(s))),
            FieldKind::TwistedRight => {
                let inner = sp.apply_twist_adjoint(s);
                let r = sp.apply_reflection(&self.apply_bare(&sp.apply_reflection(&inner)));
                sp.apply_twist(&r)
            }
        }
    }

    /// All field operators are odd.
    pub fn grade(&self) -> Grade {
        Grade::Odd
    }

    /// Dense matrix in the given basis.
    pub fn dense(&self, basis: Arc<FockBasis>) -> FockOperator {
        FockOperator::from_linear_map(basis, self)
    }
}

impl FockMap for Field {
    fn apply_to(&self, state: &FockState) -> FockState {
        self.apply(state)
    }
}

/// An operator with a known grade, accepted by [`graded_commutator_norm`].
pub trait Graded: FockMap {
    /// Grade of the operator.
    fn grade_tag(&self) -> Grade;
}

impl Graded for Field {
    fn grade_tag(&self) -> Grade {
        Grade::Odd
    }
}

impl Graded for FockOperator {
    fn grade_tag(&self) -> Grade {
        self.grade()
    }
}

fn restricted_basis(space: &FockSpace) -> Result<FockBasis> {
    if space.n_max() < 2 {
        return Err(Error::Truncation("locality norms need N_max ≥ 2".into()));
    }
    FockBasis::up_to(space, space.n_max() - 2)
}

/// ‖AB + BA‖ on sectors ≤ N_max − 2 for odd A and B.
pub fn graded_commutator_norm(space: &FockSpace, a: &dyn Graded, b: &dyn Graded) -> Result<f64> {
    if a.grade_tag() != Grade::Odd || b.grade_tag() != Grade::Odd {
        return Err(Error::GradeMismatch(format!(
            "graded commutator of two odd operators requested, got {:?} and {:?}",
            a.grade_tag(),
            b.grade_tag()
        )));
    }
    let basis = restricted_basis(space)?;
    let f = |s: &FockState| &a.apply_to(&b.apply_to(s)) + &b.apply_to(&a.apply_to(s));
    Ok(map_norm(&basis, space.n_max() - 2, &f))
}

/// ‖AB − BA‖ on sectors ≤ N_max − 2.
pub fn commutator_norm(space: &FockSpace, a: &dyn FockMap, b: &dyn FockMap) -> Result<f64> {
    let basis = restricted_basis(space)?;
    let f = |s: &FockState| &a.apply_to(&b.apply_to(s)) - &b.apply_to(&a.apply_to(s));
    Ok(map_norm(&basis, space.n_max() - 2, &f))
}

/// Which operator pair a locality scan measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalityPair {
    /// φ(f) against φ̂(g_d); the anticommutator is the locality measure.
    PhiPhiHat,
    /// ψ±(f) against φ′(g_d) for S = −1; the commutator is the locality measure.
    MajoranaPhiPrime(Sign),
}

/// One row of a locality scan.
#[derive(Clone, Debug, Serialize)]
pub struct LocalityRow {
    /// Spatial separation d.
    pub separation: f64,
    /// ‖AB + BA‖.
    pub anticommutator_norm: f64,
    /// ‖AB − BA‖.
    pub commutator_norm: f64,
}

/// Result of a wedge-locality scan over separations.
#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    /// Scattering function descriptor.
    pub smatrix: String,
    /// Operator pair.
    pub pair: LocalityPair,
    /// Rows in the order of the requested separations.
    pub rows: Vec<LocalityRow>,
    /// Name of the column used as locality measure.
    pub measure: String,
    /// True when the measure strictly decreases along the rows.
    pub monotone_decay: bool,
    /// Measure at the first separation divided by the measure at the last.
    pub decay_ratio: f64,
    /// Smallest value of the measure.
    pub floor: f64,
}

impl LocalityReport {
    /// Values of the locality measure per row.
    pub fn measure_values(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match self.pair {
                LocalityPair::PhiPhiHat => r.anticommutator_norm,
                LocalityPair::MajoranaPhiPrime(_) => r.commutator_norm,
            })
            .collect()
    }
}

/// Translates `g_right` by (0, d) for each separation and records the graded
/// and plain commutators of the selected pair on sectors ≤ N_max − 2.
///
/// Fails with [`Error::SupportViolation`] if the supports are not
/// wedge-separated at the largest separation.
pub fn wedge_locality_report(
    space: &FockSpace,
    f_left: &TestFunction,
    g_right: &TestFunction,
    separations: &[f64],
    pair: LocalityPair,
) -> Result<LocalityReport> {
    let d_max = separations.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if separations.is_empty() || !wedge_separated(f_left, &g_right.translated([0.0, d_max])) {
        return Err(Error::SupportViolation(format!(
            "supports of radius {:.3} and {:.3} never become wedge-separated up to d = {d_max}",
            f_left.support_radius(),
            g_right.support_radius()
        )));
    }
    let a = match pair {
        LocalityPair::PhiPhiHat => phi(space, f_left),
        LocalityPair::MajoranaPhiPrime(sign) => majorana(space, f_left, sign)?,
    };
    let basis = restricted_basis(space)?;
    let dom = space.n_max() - 2;
    let mut rows = Vec::with_capacity(separations.len());
    for &d in separations {
        let g = g_right.translated([0.0, d]);
        let b = match pair {
            LocalityPair::PhiPhiHat => phi_hat(space, &g),
            LocalityPair::MajoranaPhiPrime(_) => phi_prime(space, &g),
        };
        // Both products are computed once per basis vector and reused.
        let mut anti_cols = Vec::new();
        let mut comm_cols = Vec::new();
        for i in 0..basis.dim_up_to(dom) {
            let u = basis.state(i);
            let ab = a.apply(&b.apply(&u));
            let ba = b.apply(&a.apply(&u));
            anti_cols.push(&ab + &ba);
            comm_cols.push(&ab - &ba);
        }
        rows.push(LocalityRow {
            separation: d,
            anticommutator_norm: gram_norm(&anti_cols),
            commutator_norm: gram_norm(&comm_cols),
        });
    }
    let mut report = LocalityReport {
        smatrix: space.s().descriptor(),
        pair,
        rows,
        measure: match pair {
            LocalityPair::PhiPhiHat => "anticommutator_norm".into(),
            LocalityPair::MajoranaPhiPrime(_) => "commutator_norm".into(),
        },
        monotone_decay: false,
        decay_ratio: 0.0,
        floor: 0.0,
    };
    let m = report.measure_values();
    report.monotone_decay = m.windows(2).all(|w| w[1] < w[0]);
    report.decay_ratio = m[0] / m[m.len() - 1];
    report.floor = m.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(report)
}

fn gram_norm(cols: &[FockState]) -> f64 {
    let k = cols.len();
    let mut g = nalgebra::DMatrix::<C64>::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = cols[a].inner(&cols[b]);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    crate::linalg::norm_from_gram(&g)
}
