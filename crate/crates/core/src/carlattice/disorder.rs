//! Disorder operators, the conditional expectation m and the automorphism β.

use nalgebra::DMatrix;

use super::system::{diff_norm, CarElement, CarSystem, Side};
use crate::linalg::{spectral_norm, vectorize};
use crate::{Error, Result, C64};

/// Relative least-squares residual above which an element is reported as
/// lying outside 𝓕(O) + 𝓕(O)V.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Largest residual of the left disorder conditions accepted by [`beta_automorphism`].
pub const DISORDER_TOL: f64 = 1e-10;

/// The left disorder operator V_L = ∏_{left modes} (1 − 2a_j†a_j).
pub fn disorder_left(sys: &CarSystem) -> CarElement {
    sys.element(sys.parity(&sys.left_modes()), Side::Left).expect("parity has the system dimension")
}

/// The right disorder operator V_R = ΓV_L = ∏_{right modes} (1 − 2a_j†a_j).
pub fn disorder_right(sys: &CarSystem) -> CarElement {
    sys.element(sys.parity(&sys.right_modes()), Side::Right).expect("parity has the system dimension")
}

/// Generators of the twisted right wedge algebra M_y = Z 𝓕(right) Z*.
pub(crate) fn right_wedge_generators(sys: &CarSystem) -> Vec<DMatrix<C64>> {
    let z = sys.twist();
    sys.generators(&sys.regions().right).into_iter().map(|g| z * g * z.adjoint()).collect()
}

fn disorder_residual(sys: &CarSystem, v: &DMatrix<C64>, flip_left: bool) -> f64 {
    let id = sys.identity();
    let g = sys.gamma();
    let mut worst = diff_norm(&(v.adjoint() * v), &id).max(diff_norm(&(v * g), &(g * v)));
    let left = sys.generators(&sys.regions().left);
    let right = right_wedge_generators(sys);
    let conj = |a: &DMatrix<C64>| v * a * v.adjoint();
    for a in &left {
        let target = if flip_left { sys.alpha(a) } else { a.clone() };
        worst = worst.max(diff_norm(&conj(a), &target));
    }
    for a in &right {
        let target = if flip_left { a.clone() } else { sys.alpha(a) };
        worst = worst.max(diff_norm(&conj(a), &target));
    }
    worst
}

/// Residual of the left disorder conditions for V: unitarity, [V, Γ] = 0,
/// VAV* = ΓAΓ on M_x′ and VAV* = A on M_y, checked on generators.
pub fn left_disorder_residual(sys: &CarSystem, v: &DMatrix<C64>) -> f64 {
    disorder_residual(sys, v, true)
}

/// Residual of the right disorder conditions: the roles of M_x′ and M_y swapped.
pub fn right_disorder_residual(sys: &CarSystem, v: &DMatrix<C64>) -> f64 {
    disorder_residual(sys, v, false)
}

/// m(A) = (A + V_L A V_L* + V_R A V_R* + V_L V_R A V_R* V_L*)/4.
pub fn conditional_expectation(sys: &CarSystem, a: &CarElement) -> CarElement {
    let vl = disorder_left(sys).into_matrix();
    let vr = disorder_right(sys).into_matrix();
    let vlr = &vl * &vr;
    let x = a.matrix();
    let sum = x + &vl * x * vl.adjoint() + &vr * x * vr.adjoint() + &vlr * x * vlr.adjoint();
    sys.element(sum * C64::new(0.25, 0.0), a.side()).expect("m keeps the system dimension")
}

/// The decomposition A = A₁ + A₂V with A₁, A₂ ∈ 𝓕(O).
#[derive(Clone, Debug)]
pub struct BetaDecomposition {
    /// The 𝓕(O) part.
    pub a1: DMatrix<C64>,
    /// The coefficient of V.
    pub a2: DMatrix<C64>,
    /// Relative least-squares residual ‖A − A₁ − A₂V‖_F / ‖A‖_F.
    pub residual: f64,
}

/// Solves A = A₁ + A₂V over the monomial basis of 𝓕(O) by least squares.
pub fn beta_decompose(sys: &CarSystem, a: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<BetaDecomposition> {
    if a.shape() != (sys.dim(), sys.dim()) || v.shape() != (sys.dim(), sys.dim()) {
        return Err(Error::Shape(format!("β needs {0}×{0} matrices", sys.dim())));
    }
    let basis = sys.algebra_basis(&sys.regions().local);
    let k = basis.len();
    let mut m = DMatrix::<C64>::zeros(sys.dim() * sys.dim(), 2 * k);
    for (i, b) in basis.iter().enumerate() {
        m.set_column(i, &vectorize(b));
        m.set_column(k + i, &vectorize(&(b * v)));
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-10 * smax {
        return Err(Error::Decomposition("𝓕(O) and 𝓕(O)V overlap, so A = A₁ + A₂V is not unique".into()));
    }
    let rhs = vectorize(a);
    let coeffs = svd.solve(&rhs, 0.0).map_err(|e| Error::Decomposition(e.to_string()))?;
    let scale = rhs.norm();
    let residual = if scale == 0.0 { 0.0 } else { (&m * &coeffs - &rhs).norm() / scale };
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Decomposition(format!(
            "A lies outside 𝓕(O) + 𝓕(O)V (relative residual {residual:.3e})"
        )));
    }
    let mut a1 = DMatrix::zeros(sys.dim(), sys.dim());
    let mut a2 = DMatrix::zeros(sys.dim(), sys.dim());
    for (i, b) in basis.iter().enumerate() {
        a1 += b * coeffs[i];
        a2 += b * coeffs[k + i];
    }
    Ok(BetaDecomposition { a1, a2, residual })
}

/// β(A) = A₁ − A₂V for A = A₁ + A₂V, with V a left disorder operator.
pub fn beta_automorphism(sys: &CarSystem, a: &CarElement, v: &CarElement) -> Result<CarElement> {
    let r = left_disorder_residual(sys, v.matrix());
    if r > DISORDER_TOL * spectral_norm(v.matrix()).max(1.0) {
        return Err(Error::Precondition(format!("V is not a left disorder operator (residual {r:.3e})")));
    }
    let d = beta_decompose(sys, a.matrix(), v.matrix())?;
    sys.element(d.a1 - d.a2 * v.matrix(), a.side())
}
