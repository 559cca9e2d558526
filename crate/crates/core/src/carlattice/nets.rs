//! Matrix subspaces of the field net 𝓕(O), its extension 𝓕̂(O) by a left
//! disorder operator, and the fixed points of α, β, α∘β and {α, β}.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::disorder::{beta_decompose, disorder_left, right_wedge_generators};
use super::system::{CarSystem, Regions};
use crate::linalg::{null_space, unvectorize, vectorize, Subspace};
use crate::{Result, C64};

/// Tolerance for linear independence when spanning subspaces.
const SPAN_TOL: f64 = 1e-9;

/// Relative singular value (or eigenvalue) cutoff for null spaces.
const NULL_TOL: f64 = 1e-9;

/// Residual below which two subspaces count as equal.
pub const SUBSPACE_TOL: f64 = 1e-12;

/// One subspace identity lhs = rhs with its dimension count.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceIdentity {
    /// Human-readable statement of the identity.
    pub name: String,
    /// Dimension of the computed left-hand side.
    pub lhs_dim: usize,
    /// Dimension of the independently computed right-hand side.
    pub rhs_dim: usize,
    /// The dimension both sides must have.
    pub expected_dim: usize,
    /// Largest relative distance of a basis vector of one side from the other side.
    pub residual: f64,
    /// Dimensions agree with the expectation and the residual is below [`SUBSPACE_TOL`].
    pub holds: bool,
}

impl SubspaceIdentity {
    fn new(name: &str, lhs: &Subspace, rhs: &Subspace, expected_dim: usize) -> Self {
        let residual = lhs.containment_residual(rhs).max(rhs.containment_residual(lhs));
        let holds = lhs.dim() == expected_dim && rhs.dim() == expected_dim && residual < SUBSPACE_TOL;
        Self { name: name.into(), lhs_dim: lhs.dim(), rhs_dim: rhs.dim(), expected_dim, residual, holds }
    }
}

/// The subspace identities of the extended net for one system.
#[derive(Clone, Debug, Serialize)]
pub struct FourNetsReport {
    /// Number of left modes.
    pub n_left: usize,
    /// Number of right modes.
    pub n_right: usize,
    /// The region split used.
    pub regions: Regions,
    /// dim 𝓕(O).
    pub field_dim: usize,
    /// dim 𝓕̂(O).
    pub extended_dim: usize,
    /// The verified identities.
    pub identities: Vec<SubspaceIdentity>,
    /// All identities hold.
    pub pass: bool,
}

/// Span of a set of matrices inside the d²-dimensional matrix space.
pub fn matrix_span<'a>(sys: &CarSystem, mats: impl IntoIterator<Item = &'a DMatrix<C64>>) -> Subspace {
    Subspace::span(sys.dim() * sys.dim(), mats.into_iter().map(vectorize), SPAN_TOL)
}

/// The commutant {X : [X, g] = 0 for all generators g}, from the null space
/// of Σ_g B_g*B_g with B_g = 1⊗g − gᵀ⊗1 acting on column-stacked X.
pub fn commutant(sys: &CarSystem, generators: &[DMatrix<C64>]) -> Subspace {
    let d = sys.dim();
    let id = DMatrix::<C64>::identity(d, d);
    let mut gram = DMatrix::<C64>::zeros(d * d, d * d);
    for g in generators {
        let b = id.kronecker(g) - g.transpose().kronecker(&id);
        gram += b.adjoint() * b;
    }
    let eig = SymmetricEigen::new((&gram + gram.adjoint()) * C64::new(0.5, 0.0));
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(1.0);
    let null = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= NULL_TOL * top)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned());
    Subspace::span(d * d, null, SPAN_TOL)
}

/// The fixed points {X ∈ S : map(X) = X} of a linear map defined on S.
pub fn fixed_subspace(
    sys: &CarSystem,
    space: &Subspace,
    map: impl Fn(&DMatrix<C64>) -> Result<DMatrix<C64>>,
) -> Result<Subspace> {
    let d = sys.dim();
    let k = space.dim();
    if k == 0 {
        return Ok(Subspace::zero(d * d));
    }
    let mut m = DMatrix::<C64>::zeros(d * d, k);
    for (j, b) in space.basis().iter().enumerate() {
        let x = unvectorize(b, d);
        m.set_column(j, &vectorize(&(map(&x)? - x)));
    }
    let vectors = null_space(&m, NULL_TOL).into_iter().map(|c| {
        space.basis().iter().zip(c.iter()).fold(nalgebra::DVector::zeros(d * d), |acc, (b, &cj)| acc + b * cj)
    });
    Ok(Subspace::span(d * d, vectors, SPAN_TOL))
}

/// Computes 𝓕(O), 𝓕̂(O) = 𝓕(O) + 𝓕(O)V_L and the fixed-point subspaces,
/// and compares each with its independent characterization:
///
/// - 𝓕(O) = M_xᵗ ∩ M_y′ with M_y′ computed as a commutant;
/// - α-fixed points = 𝓐̂(O) = 𝓕̂(O)₊;
/// - β-fixed points = 𝓕(O);
/// - (α∘β)-fixed points = 𝓕(O)₊ + 𝓕(O)₋V_L;
/// - (α∘β)-fixed points = Ǎ(O) = M_x ∩ M_y′ with both factors computed as commutants;
/// - points fixed by α and β = 𝓐(O) = 𝓕(O)₊.
pub fn fixed_point_nets(sys: &CarSystem) -> Result<FourNetsReport> {
    let regions = sys.regions();
    let v = disorder_left(sys).into_matrix();
    let half = C64::new(0.5, 0.0);
    let even = |x: &DMatrix<C64>| (x + sys.alpha(x)) * half;
    let odd = |x: &DMatrix<C64>| (x - sys.alpha(x)) * half;

    let local_basis = sys.algebra_basis(&regions.local);
    let field = matrix_span(sys, &local_basis);
    let field_dim = field.dim();
    let with_v: Vec<DMatrix<C64>> = local_basis.iter().map(|b| b * &v).collect();
    let extended = matrix_span(sys, local_basis.iter().chain(&with_v));

    // M_xᵗ = 𝓕(O ∪ right), M_y′ and M_x as commutants.
    let mut outer_right = regions.local.clone();
    outer_right.extend(&regions.right);
    let mx_twisted = matrix_span(sys, &sys.algebra_basis(&outer_right));
    let my_commutant = commutant(sys, &right_wedge_generators(sys));
    let mx = commutant(sys, &sys.generators(&regions.left));
    let field_as_intersection = mx_twisted.intersection(&my_commutant, NULL_TOL);
    let check_algebra = mx.intersection(&my_commutant, NULL_TOL);

    let alpha = |x: &DMatrix<C64>| Ok(sys.alpha(x));
    let beta = |x: &DMatrix<C64>| {
        let dec = beta_decompose(sys, x, &v)?;
        Ok(dec.a1 - dec.a2 * &v)
    };
    let alpha_fixed = fixed_subspace(sys, &extended, alpha)?;
    let beta_fixed = fixed_subspace(sys, &extended, beta)?;
    let alpha_beta_fixed = fixed_subspace(sys, &extended, |x| Ok(sys.alpha(&beta(x)?)))?;
    let both_fixed = fixed_subspace(sys, &beta_fixed, alpha)?;

    let extended_basis: Vec<DMatrix<C64>> = local_basis.iter().chain(&with_v).map(even).collect();
    let extended_even = matrix_span(sys, &extended_basis);
    let field_even_mats: Vec<DMatrix<C64>> = local_basis.iter().map(even).collect();
    let field_even = matrix_span(sys, &field_even_mats);
    let untwisted_mats: Vec<DMatrix<C64>> =
        local_basis.iter().map(even).chain(local_basis.iter().map(|b| odd(b) * &v)).collect();
    let untwisted = matrix_span(sys, &untwisted_mats);

    let identities = vec![
        SubspaceIdentity::new("F(O) = M_x^t ∩ M_y'", &field, &field_as_intersection, field_dim),
        SubspaceIdentity::new("{A ∈ F̂(O) : α(A) = A} = F̂(O)_+", &alpha_fixed, &extended_even, field_dim),
        SubspaceIdentity::new("{A ∈ F̂(O) : β(A) = A} = F(O)", &beta_fixed, &field, field_dim),
        SubspaceIdentity::new("{A ∈ F̂(O) : αβ(A) = A} = F(O)_+ + F(O)_- V_L", &alpha_beta_fixed, &untwisted, field_dim),
        SubspaceIdentity::new("{A ∈ F̂(O) : αβ(A) = A} = M_x ∩ M_y'", &alpha_beta_fixed, &check_algebra, field_dim),
        SubspaceIdentity::new("{A ∈ F̂(O) : α(A) = β(A) = A} = F(O)_+", &both_fixed, &field_even, field_dim / 2),
    ];
    let pass = extended.dim() == 2 * field_dim && identities.iter().all(|i| i.holds);
    Ok(FourNetsReport {
        n_left: sys.n_left(),
        n_right: sys.n_right(),
        regions,
        field_dim,
        extended_dim: extended.dim(),
        identities,
        pass,
    })
}
