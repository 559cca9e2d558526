//! Wave packets, χ-averaging, asymptotic states and two-particle scattering.
//!
//! Conventions:
//!
//! * A packet is given by f̃(k) on the spatial momentum line; on the rapidity
//!   grid it is the one-particle vector ψ(θ) = f̃(μ sinh θ).
//! * χ̃ is normalised so that χ(x) = ∫ χ̃(q) e^{−iq·x} d²q. Then the matrix
//!   elements of A^χ = ∫ χ(x) U(x) A U(x)* d²x between momentum eigenvectors are
//!   those of A multiplied by (2π)² χ̃(P_out − P_in), and φ(ψ)^χ = (2π)² z†(ψ)
//!   whenever χ̃ equals 1 on the shell image of the rapidity support of ψ.
//! * Asymptotic states use the normalised generator (2π)⁻² φ^χ(ψ) = z†(ψ).
//! * On the one-particle space the reflection acts as U(j)ψ = −i conj ψ.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::fockspace::tensor::{factorial, flat_index, permutations, tensor_len, unflatten};
use crate::fockspace::{FockBasis, FockOperator, FockSpace, FockState, RapidityGrid};
use crate::quad::{integrate, QuadOptions};
use crate::smatrix::ScatteringFunction;
use crate::{fields::bump, Error, Result, C64, I};

/// A one-particle wave packet with compact rapidity support.
///
/// f̃(k) = b((asinh(k/μ) − centre)/half_width) with the bump b(u) = exp(−1/(1−u²)),
/// so the rapidity support is exactly [centre − half_width, centre + half_width].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WavePacket {
    /// Mass μ.
    pub mass: f64,
    /// Central rapidity.
    pub center: f64,
    /// Rapidity half-width.
    pub half_width: f64,
}

impl WavePacket {
    /// A packet of mass `mass` centred at rapidity `center`.
    pub fn new(mass: f64, center: f64, half_width: f64) -> Result<Self> {
        if !(mass > 0.0 && half_width > 0.0 && center.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "packet needs μ > 0 and half-width > 0, got μ = {mass}, half-width = {half_width}"
            )));
        }
        Ok(Self { mass, center, half_width })
    }

    /// Amplitude as a function of rapidity.
    pub fn at_rapidity(&self, theta: f64) -> f64 {
        bump((theta - self.center) / self.half_width)
    }

    /// f̃(k) on the momentum line.
    pub fn ftilde(&self, k: f64) -> f64 {
        self.at_rapidity((k / self.mass).asinh())
    }

    /// Closed rapidity support interval.
    pub fn rapidity_support(&self) -> [f64; 2] {
        [self.center - self.half_width, self.center + self.half_width]
    }

    /// Momentum support interval of f̃.
    pub fn momentum_support(&self) -> [f64; 2] {
        let [a, b] = self.rapidity_support();
        [self.mass * a.sinh(), self.mass * b.sinh()]
    }

    /// The packet as a one-particle vector on the grid.
    pub fn to_grid(&self, grid: &RapidityGrid) -> Vec<C64> {
        (0..grid.len()).map(|k| C64::new(self.at_rapidity(grid.node(k)), 0.0)).collect()
    }

    /// The precursor relation: the support of `self` lies strictly below that of `other`.
    pub fn precedes(&self, other: &WavePacket) -> bool {
        self.rapidity_support()[1] < other.rapidity_support()[0]
    }
}

/// Rapidity interval spanned by the grid nodes where |ψ| exceeds `eps`.
pub fn grid_rapidity_support(grid: &RapidityGrid, psi: &[C64], eps: f64) -> Option<[f64; 2]> {
    let nodes: Vec<usize> = (0..psi.len()).filter(|&k| psi[k].norm() > eps).collect();
    Some([grid.node(*nodes.first()?), grid.node(*nodes.last()?)])
}

/// f(τ, x) = ∫ dk/(2π) f̃(k) exp(ixk − iτ√(k² + μ²)) by adaptive quadrature over
/// the momentum support of f̃.
pub fn packet_evolve(f: &WavePacket, tau: f64, x: f64, opts: QuadOptions) -> Result<C64> {
    let [a, b] = f.momentum_support();
    let mu2 = f.mass * f.mass;
    let v = integrate(|k| f.ftilde(k) * (I * (x * k - tau * (k * k + mu2).sqrt())).exp(), a, b, opts)?;
    Ok(v / (2.0 * PI))
}

/// Quintic smoothstep 6t⁵ − 15t⁴ + 10t³ on [0, 1], clamped outside.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

fn plateau_profile(distance: f64, plateau: f64, window: f64) -> f64 {
    if distance <= plateau {
        1.0
    } else if distance >= window {
        0.0
    } else {
        1.0 - smoothstep((distance - plateau) / (window - plateau))
    }
}

/// Momentum-space cutoff χ̃ concentrated near the positive mass shell.
///
/// For q⁰ > 0 and q·q > 0, with m = √(q·q) and ϑ the rapidity of q,
/// χ̃(q) = h(|m − μ|; mass plateau, mass window) · h(dist(ϑ, plateau); 0, margin),
/// where h is 1 up to the plateau, 0 beyond the window and a C² quintic in between.
/// Elsewhere χ̃ vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiFilter {
    /// Mass μ of the shell.
    pub mass: f64,
    /// χ̃ = 1 for |m − μ| up to this value.
    pub mass_plateau: f64,
    /// χ̃ = 0 for |m − μ| beyond this value.
    pub mass_window: f64,
    /// Rapidity plateau on which χ̃ = 1 on the shell.
    pub rapidity_plateau: [f64; 2],
    /// Width of the rapidity transition outside the plateau.
    pub rapidity_margin: f64,
}

impl ChiFilter {
    /// Validated constructor.
    pub fn new(mass: f64, mass_plateau: f64, mass_window: f64, rapidity_plateau: [f64; 2], rapidity_margin: f64) -> Result<Self> {
        if !(mass > 0.0 && mass_plateau >= 0.0 && mass_window > mass_plateau && rapidity_margin > 0.0)
            || rapidity_plateau[0] > rapidity_plateau[1]
        {
            return Err(Error::InvalidParameter("χ filter needs 0 ≤ plateau < window, margin > 0, ordered plateau".into()));
        }
        Ok(Self { mass, mass_plateau, mass_window, rapidity_plateau, rapidity_margin })
    }

    /// A filter whose plateau is the given rapidity interval, with mass plateau
    /// 0.05μ, mass window 0.1μ and rapidity margin 0.25.
    pub fn around(mass: f64, rapidity_plateau: [f64; 2]) -> Result<Self> {
        Self::new(mass, 0.05 * mass, 0.1 * mass, rapidity_plateau, 0.25)
    }

    /// χ̃(q).
    pub fn chi_tilde(&self, q: [f64; 2]) -> f64 {
        let s = q[0] * q[0] - q[1] * q[1];
        if q[0] <= 0.0 || s <= 0.0 {
            return 0.0;
        }
        let m = s.sqrt();
        let rap = (q[1] / m).asinh();
        let [a, b] = self.rapidity_plateau;
        let dist = if rap < a { a - rap } else if rap > b { rap - b } else { 0.0 };
        plateau_profile((m - self.mass).abs(), self.mass_plateau, self.mass_window)
            * plateau_profile(dist, 0.0, self.rapidity_margin)
    }

    /// True when the rapidity plateau contains the interval.
    pub fn covers(&self, interval: [f64; 2]) -> bool {
        self.rapidity_plateau[0] <= interval[0] && interval[1] <= self.rapidity_plateau[1]
    }
}

/// A^χ: each matrix element is multiplied by (2π)² χ̃(P_out − P_in).
pub fn chi_average(a: &FockOperator, chi: &ChiFilter) -> FockOperator {
    let basis = a.basis();
    let p: Vec<[f64; 2]> = (0..basis.dim()).map(|i| basis.total_momentum(i)).collect();
    let norm = 4.0 * PI * PI;
    let m = DMatrix::from_fn(a.dim(), a.dim(), |i, j| {
        let v = a.matrix()[(i, j)];
        if v == C64::new(0.0, 0.0) {
            return v;
        }
        v * norm * chi.chi_tilde([p[i][0] - p[j][0], p[i][1] - p[j][1]])
    });
    FockOperator::from_matrix(basis.clone(), m)
}

/// φ(ψ)^χ together with its deviation from (2π)² z†(ψ).
#[derive(Clone, Debug)]
pub struct PfgCreator {
    /// φ(ψ)^χ.
    pub operator: FockOperator,
    /// ‖φ(ψ)^χ − (2π)² z†(ψ)‖.
    pub residual: f64,
}

/// Builds φ(ψ) = z†(ψ) + z(conj ψ) densely and χ-averages it.
///
/// Fails with [`Error::Precondition`] if the plateau of χ does not cover the
/// rapidity support of ψ on the grid.
pub fn pfg_creator(basis: Arc<FockBasis>, psi: &[C64], chi: &ChiFilter) -> Result<PfgCreator> {
    let space = basis.space().clone();
    if psi.len() != space.n_points() {
        return Err(Error::Shape(format!("one-particle vector of length {} on a {}-point grid", psi.len(), space.n_points())));
    }
    if let Some(support) = grid_rapidity_support(space.grid(), psi, 0.0) {
        if !chi.covers(support) {
            return Err(Error::Precondition(format!(
                "χ plateau {:?} does not cover the rapidity support {:?}",
                chi.rapidity_plateau, support
            )));
        }
    }
    let conj: Vec<C64> = psi.iter().map(|z| z.conj()).collect();
    let field = |s: &FockState| {
        let a = space.zf_create(psi, s).expect("length checked");
        let b = space.zf_annihilate(&conj, s).expect("length checked");
        &a + &b
    };
    let phi = FockOperator::from_linear_map(basis.clone(), &field);
    let operator = chi_average(&phi, chi);
    let create = FockOperator::from_linear_map(basis, &|s: &FockState| space.zf_create(psi, s).expect("length checked"));
    let residual = operator.sub(&create.scale(C64::new(4.0 * PI * PI, 0.0))).norm();
    Ok(PfgCreator { operator, residual })
}

/// Uniform spatial grid x_j = −L + j h used for the x-integral of A^χ_τ(f).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XGrid {
    /// Half-length L.
    pub half_length: f64,
    /// Step h.
    pub step: f64,
}

impl XGrid {
    /// Grid points.
    pub fn points(&self) -> Vec<f64> {
        let n = (2.0 * self.half_length / self.step).round() as usize;
        (0..=n).map(|j| -self.half_length + j as f64 * self.step).collect()
    }
}

/// Samples f(τ, x_j) on the spatial grid.
pub fn sample_packet(f: &WavePacket, tau: f64, xgrid: &XGrid, opts: QuadOptions) -> Result<Vec<(f64, C64)>> {
    xgrid.points().into_iter().map(|x| Ok((x, packet_evolve(f, tau, x, opts)?))).collect()
}

/// F_τ(q) = e^{iq⁰τ} ∫ dx f(τ,x) e^{−iq¹x} by the trapezoid rule on sampled values.
///
/// Because f̃ has compact support the trapezoid rule is exact up to the
/// truncation of the x-range once 2π/h exceeds the momentum support width.
pub fn x_transform(samples: &[(f64, C64)], step: f64, tau: f64, q: [f64; 2]) -> C64 {
    let s: C64 = samples.iter().map(|&(x, v)| v * (-I * q[1] * x).exp()).sum();
    s * step * (I * q[0] * tau).exp()
}

/// A^χ_τ(f) = ∫ dx f(τ,x) U(τ,x) A^χ U(τ,x)*: multiplies each element of the
/// χ-averaged operator by F_τ(P_out − P_in).
pub fn chi_tau_average(a_chi: &FockOperator, f: &WavePacket, tau: f64, xgrid: &XGrid, opts: QuadOptions) -> Result<FockOperator> {
    let samples = sample_packet(f, tau, xgrid, opts)?;
    let basis = a_chi.basis();
    let p: Vec<[f64; 2]> = (0..basis.dim()).map(|i| basis.total_momentum(i)).collect();
    let m = DMatrix::from_fn(a_chi.dim(), a_chi.dim(), |i, j| {
        let v = a_chi.matrix()[(i, j)];
        if v == C64::new(0.0, 0.0) {
            return v;
        }
        v * x_transform(&samples, xgrid.step, tau, [p[i][0] - p[j][0], p[i][1] - p[j][1]])
    });
    Ok(FockOperator::from_matrix(basis.clone(), m))
}

/// The graded permutation representation π_Γ on the n-fold tensor power of a
/// graded d-dimensional one-particle space, and its projector P_Γ.
#[derive(Clone, Debug)]
pub struct GradedSymmetrizer {
    n: usize,
    grades: Vec<i8>,
    perms: Vec<Vec<usize>>,
}

impl GradedSymmetrizer {
    /// `grades[i]` ∈ {+1, −1} is the grade of the i-th basis vector; n ≤ 6.
    pub fn new(n: usize, grades: Vec<i8>) -> Result<Self> {
        if n > 6 {
            return Err(Error::InvalidParameter(format!("graded symmetrizer supports n ≤ 6, got {n}")));
        }
        if grades.is_empty() || grades.iter().any(|&g| g != 1 && g != -1) {
            return Err(Error::InvalidParameter("grades must be a nonempty list of ±1".into()));
        }
        Ok(Self { n, grades, perms: permutations(n) })
    }

    /// Rank n.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// One-particle dimension d.
    pub fn dim(&self) -> usize {
        self.grades.len()
    }

    /// π_Γ(σ) applied to a flat rank-n tensor.
    ///
    /// On basis tensors, π_Γ(σ)(e_{i_1} ⊗ … ⊗ e_{i_n}) = ε · e_{i_σ(1)} ⊗ … ⊗ e_{i_σ(n)}
    /// where ε collects a factor −1 for each inverted pair of odd factors.
    pub fn apply_permutation(&self, sigma: &[usize], tensor: &[C64]) -> Result<Vec<C64>> {
        let d = self.dim();
        if sigma.len() != self.n || tensor.len() != tensor_len(d, self.n) {
            return Err(Error::Shape("permutation or tensor does not match the symmetrizer".into()));
        }
        let mut out = vec![C64::new(0.0, 0.0); tensor.len()];
        let mut idx = vec![0; self.n];
        let mut target = vec![0; self.n];
        for (flat, &v) in tensor.iter().enumerate() {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            unflatten(flat, d, &mut idx);
            let mut sign = 1.0;
            for a in 0..self.n {
                target[a] = idx[sigma[a]];
                for b in a + 1..self.n {
                    if sigma[a] > sigma[b] && self.grades[idx[sigma[a]]] < 0 && self.grades[idx[sigma[b]]] < 0 {
                        sign = -sign;
                    }
                }
            }
            out[flat_index(&target, d)] += v * sign;
        }
        Ok(out)
    }

    /// P_Γ = (1/n!) Σ_σ π_Γ(σ) applied to a flat tensor.
    pub fn project(&self, tensor: &[C64]) -> Result<Vec<C64>> {
        let mut acc = vec![C64::new(0.0, 0.0); tensor.len()];
        for sigma in &self.perms {
            for (a, b) in acc.iter_mut().zip(self.apply_permutation(sigma, tensor)?) {
                *a += b;
            }
        }
        let w = 1.0 / factorial(self.n);
        Ok(acc.into_iter().map(|z| z * w).collect())
    }

    /// P_Γ as a dense d^n × d^n matrix.
    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        let len = tensor_len(self.dim(), self.n);
        let mut m = DMatrix::zeros(len, len);
        let mut e = vec![C64::new(0.0, 0.0); len];
        for j in 0..len {
            e[j] = C64::new(1.0, 0.0);
            let col = self.project(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
            e[j] = C64::new(0.0, 0.0);
        }
        Ok(m)
    }
}

/// Tensor product ψ_1 ⊗ … ⊗ ψ_n of one-particle vectors as a flat tensor.
pub fn product_tensor(factors: &[Vec<C64>]) -> Vec<C64> {
    factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, f| {
        let mut out = Vec::with_capacity(acc.len() * f.len());
        for a in &acc {
            for b in f {
                out.push(a * b);
            }
        }
        out
    })
}

fn check_ordered(packets: &[WavePacket], what: &str) -> Result<()> {
    for (j, w) in packets.windows(2).enumerate() {
        if !w[0].precedes(&w[1]) {
            return Err(Error::OrderingViolation(format!(
                "{what} packets {j} and {} are not rapidity ordered: {:?} vs {:?}",
                j + 1,
                w[0].rapidity_support(),
                w[1].rapidity_support()
            )));
        }
    }
    Ok(())
}

fn check_chi(packets: &[WavePacket], chi: &ChiFilter) -> Result<()> {
    for p in packets {
        if !chi.covers(p.rapidity_support()) {
            return Err(Error::Precondition(format!(
                "χ plateau {:?} does not cover packet support {:?}",
                chi.rapidity_plateau,
                p.rapidity_support()
            )));
        }
    }
    Ok(())
}

/// Product of normalised generators (2π)⁻² φ^χ(ξ_1) ⋯ (2π)⁻² φ^χ(ξ_k) Ω, realised
/// through φ(ξ)^χ = (2π)² z†(ξ).
fn generator_product(space: &FockSpace, vectors: &[Vec<C64>]) -> Result<FockState> {
    if vectors.len() > space.n_max() {
        return Err(Error::Truncation(format!("{} particles exceed N_max = {}", vectors.len(), space.n_max())));
    }
    let mut state = space.vacuum();
    for v in vectors.iter().rev() {
        state = space.zf_create(v, &state)?;
    }
    Ok(state)
}

/// W_out(ψ_1 ⊗ … ⊗ ψ_k) = (2π)⁻²φ^χ(ψ_1) ⋯ (2π)⁻²φ^χ(ψ_k) Ω for ψ_1 ≺ … ≺ ψ_k.
pub fn w_out(space: &FockSpace, packets: &[WavePacket], chi: &ChiFilter) -> Result<FockState> {
    check_ordered(packets, "out")?;
    check_chi(packets, chi)?;
    let vecs: Vec<Vec<C64>> = packets.iter().map(|p| p.to_grid(space.grid())).collect();
    generator_product(space, &vecs)
}

/// The reflection on the one-particle space, U(j)ψ = −i conj ψ.
pub fn reflect_one_particle(space: &FockSpace, psi: &[C64]) -> Result<Vec<C64>> {
    let st = space.apply_uj(&space.one_particle(psi)?);
    Ok(st.sector(1).to_vec())
}

/// ⟨W_out(ψ), U(j) φ^χ(U(j)η_1) ⋯ φ^χ(U(j)η_n) Ω⟩ / √(k! n!) with normalised generators.
pub fn s_matrix_element(space: &FockSpace, out: &[WavePacket], inc: &[WavePacket], chi: &ChiFilter) -> Result<C64> {
    check_ordered(inc, "in")?;
    check_chi(inc, chi)?;
    let out_state = w_out(space, out, chi)?;
    let reflected = inc
        .iter()
        .map(|p| reflect_one_particle(space, &p.to_grid(space.grid())))
        .collect::<Result<Vec<_>>>()?;
    let in_state = space.apply_uj(&generator_product(space, &reflected)?);
    Ok(out_state.inner(&in_state) / (factorial(out.len()) * factorial(inc.len())).sqrt())
}

/// Coefficient of the δ-pairing in the n-particle kernel of P_Γ S P_Γ:
/// ∏_{k<m} (−S(|θ_k − θ_m|)) when η is a permutation of θ, and 0 otherwise.
pub fn analytic_kernel(s: &ScatteringFunction, theta: &[f64], eta: &[f64]) -> Result<C64> {
    if theta.len() != eta.len() {
        return Err(Error::Shape(format!("{} out rapidities against {} in rapidities", theta.len(), eta.len())));
    }
    let mut a = theta.to_vec();
    let mut b = eta.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut prod = C64::new(1.0, 0.0);
    for k in 0..theta.len() {
        for m in k + 1..theta.len() {
            prod *= -s.eval_real((theta[k] - theta[m]).abs());
        }
    }
    Ok(prod)
}

/// The kernel of P_Γ S P_Γ smeared against ordered, pairwise matched packets:
/// (1/n!) ∫ ∏_j conj ψ_j(θ_j) η_j(θ_j) ∏_{k<m} (−S(|θ_k − θ_m|)) dθ, by nested
/// adaptive quadrature in continuous rapidity.
pub fn analytic_smeared(s: &ScatteringFunction, out: &[WavePacket], inc: &[WavePacket], opts: QuadOptions) -> Result<C64> {
    if out.len() != inc.len() {
        return Err(Error::Shape("smeared kernel needs equally many in and out packets".into()));
    }
    check_ordered(out, "out")?;
    check_ordered(inc, "in")?;
    let mut ranges = Vec::with_capacity(out.len());
    for (p, q) in out.iter().zip(inc) {
        let (a, b) = (p.rapidity_support(), q.rapidity_support());
        let lo = a[0].max(b[0]);
        let hi = a[1].min(b[1]);
        if lo >= hi {
            return Ok(C64::new(0.0, 0.0));
        }
        ranges.push([lo, hi]);
    }
    let mut theta = vec![0.0; out.len()];
    let v = nested(s, out, inc, &ranges, &mut theta, 0, opts)?;
    Ok(v / factorial(out.len()))
}

fn nested(
    s: &ScatteringFunction,
    out: &[WavePacket],
    inc: &[WavePacket],
    ranges: &[[f64; 2]],
    theta: &mut Vec<f64>,
    level: usize,
    opts: QuadOptions,
) -> Result<C64> {
    if level == out.len() {
        let mut prod = C64::new(1.0, 0.0);
        for k in 0..theta.len() {
            for m in k + 1..theta.len() {
                prod *= -s.eval_real((theta[k] - theta[m]).abs());
            }
        }
        return Ok(prod);
    }
    let mut err = None;
    let v = integrate(
        |t| {
            theta[level] = t;
            let w = out[level].at_rapidity(t) * inc[level].at_rapidity(t);
            if w == 0.0 {
                return C64::new(0.0, 0.0);
            }
            match nested(s, out, inc, ranges, theta, level + 1, opts) {
                Ok(v) => v * w,
                Err(e) => {
                    err.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        ranges[level][0],
        ranges[level][1],
        opts,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Comparison of a computed S-matrix element with the analytic kernel.
#[derive(Clone, Debug, Serialize)]
pub struct ScatteringReport {
    /// Scattering function descriptor.
    pub smatrix: String,
    /// Outgoing packets.
    pub out_packets: Vec<WavePacket>,
    /// Incoming packets.
    pub in_packets: Vec<WavePacket>,
    /// Element from the generator construction.
    pub computed: C64,
    /// Smeared analytic kernel.
    pub analytic: C64,
    /// |computed − analytic| / |analytic|.
    pub relative_error: f64,
    /// Ratio of the computed element to the free-fermion (S ≡ −1) element.
    pub phase: C64,
    /// ∏_{k<m} (−S(θ_m − θ_k)) at the packet centres.
    pub expected_phase: C64,
    /// |phase − expected_phase| / |expected_phase|.
    pub phase_error: f64,
}

/// Computes the element, the smeared analytic kernel, and the two-body phase
/// relative to free fermions (S ≡ −1, where the two-particle S-matrix is 1).
pub fn scattering_report(space: &FockSpace, out: &[WavePacket], inc: &[WavePacket], chi: &ChiFilter) -> Result<ScatteringReport> {
    let s = space.s();
    let computed = s_matrix_element(space, out, inc, chi)?;
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 };
    let analytic = analytic_smeared(s, out, inc, opts)?;
    let free_space = FockSpace::new(space.grid().clone(), ScatteringFunction::minus_one(), space.n_max())?;
    let free = s_matrix_element(&free_space, out, inc, chi)?;
    let phase = computed / free;
    let mut expected_phase = C64::new(1.0, 0.0);
    for k in 0..out.len() {
        for m in k + 1..out.len() {
            expected_phase *= -s.eval_real(out[m].center - out[k].center);
        }
    }
    Ok(ScatteringReport {
        smatrix: s.descriptor(),
        out_packets: out.to_vec(),
        in_packets: inc.to_vec(),
        computed,
        analytic,
        relative_error: (computed - analytic).norm() / analytic.norm(),
        phase,
        expected_phase,
        phase_error: (phase - expected_phase).norm() / expected_phase.norm(),
    })
}
