//! Dense complex linear algebra helpers built on nalgebra: spectral norms,
//! null spaces and orthonormal subspaces of matrix spaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::sampling::seeded_rng;
use crate::C64;

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(g: &DMatrix<C64>) -> f64 {
    if g.nrows() == 0 {
        return 0.0;
    }
    // Symmetrize to remove roundoff asymmetry before the Hermitian solver.
    let h = (g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Spectral norm of a Gram matrix's square root, i.e. ‖A‖ given G = A*A.
pub fn norm_from_gram(g: &DMatrix<C64>) -> f64 {
    hermitian_max_eigenvalue(g).max(0.0).sqrt()
}

/// Spectral norm of a dense matrix.
///
/// Uses the Hermitian eigen-solver on the smaller Gram matrix when it is at
/// most 300×300 and otherwise a power iteration on A*A with a fixed start
/// vector, so results are deterministic.
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let small = a.nrows().min(a.ncols());
    if small <= 300 {
        let g = if a.ncols() <= a.nrows() { a.adjoint() * a } else { a * a.adjoint() };
        return norm_from_gram(&g);
    }
    power_iteration_norm(a, 1000, 1e-13)
}

/// Power iteration estimate of ‖A‖ with a reproducible random start vector.
pub fn power_iteration_norm(a: &DMatrix<C64>, max_iter: usize, rel_tol: f64) -> f64 {
    let mut rng = seeded_rng(0x5eed, 0);
    let mut v = DVector::<C64>::from_fn(a.ncols(), |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let n0 = v.norm();
    if n0 == 0.0 {
        return 0.0;
    }
    v /= C64::new(n0, 0.0);
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let w = a * &v;
        let u = a.adjoint() * &w;
        let lambda = u.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = u / C64::new(lambda, 0.0);
        let next = lambda.sqrt();
        if (next - estimate).abs() <= rel_tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Orthonormal basis (columns) of the null space of `m`, using singular
/// values below `tol · max(1, σ_max)`.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Vec::new();
    }
    // Pad to a square matrix so that the SVD returns a full set of right
    // singular vectors.
    let rows = m.nrows().max(ncols);
    let mut sq = DMatrix::<C64>::zeros(rows, ncols);
    sq.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(i, _)| vt.row(i).adjoint())
        .collect()
}

/// A subspace of a finite-dimensional complex inner-product space, stored as
/// an orthonormal basis with respect to the standard (Frobenius) inner product.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<DVector<C64>>,
}

impl Subspace {
    /// The zero subspace of a space of the given dimension.
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    /// Span of the given vectors; directions with residual below `tol`
    /// (relative to the vector's norm) are treated as dependent.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = DVector<C64>>, tol: f64) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.try_add(v, tol);
        }
        s
    }

    /// Adds `v` if it is independent of the current basis; returns whether it was added.
    pub fn try_add(&mut self, v: DVector<C64>, tol: f64) -> bool {
        let scale = v.norm();
        if scale == 0.0 {
            return false;
        }
        let mut w = v;
        // Two passes of modified Gram–Schmidt keep the basis orthonormal to
        // machine precision.
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let r = w.norm();
        if r <= tol * scale {
            return false;
        }
        self.basis.push(w / C64::new(r, 0.0));
        true
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Orthonormal basis vectors.
    pub fn basis(&self) -> &[DVector<C64>] {
        &self.basis
    }

    /// Distance of `v` from the subspace, relative to ‖v‖ (0 for v = 0).
    pub fn relative_residual(&self, v: &DVector<C64>) -> f64 {
        let scale = v.norm();
        if scale == 0.0 {
            return 0.0;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        w.norm() / scale
    }

    /// Largest relative residual of the vectors of `other` with respect to
    /// `self`; zero iff `other ⊆ self` up to roundoff.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        other.basis.iter().map(|v| self.relative_residual(v)).fold(0.0, f64::max)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut p = DVector::<C64>::zeros(self.ambient);
        for b in &self.basis {
            p += b * b.dotc(v);
        }
        p
    }

    /// Intersection with another subspace, computed from the null space of
    /// [Q_self, −Q_other].
    pub fn intersection(&self, other: &Subspace, tol: f64) -> Subspace {
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Subspace::zero(self.ambient);
        }
        let mut m = DMatrix::<C64>::zeros(self.ambient, a + b);
        for (j, v) in self.basis.iter().enumerate() {
            m.set_column(j, v);
        }
        for (j, v) in other.basis.iter().enumerate() {
            m.set_column(a + j, &(-v));
        }
        let null = null_space(&m, tol);
        let vectors = null.into_iter().map(|c| {
            let mut v = DVector::<C64>::zeros(self.ambient);
            for (j, b) in self.basis.iter().enumerate() {
                v += b * c[j];
            }
            v
        });
        Subspace::span(self.ambient, vectors, 1e-8)
    }

    /// True when both subspaces have equal dimension and contain each other
    /// up to `tol`.
    pub fn equals(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim() && self.containment_residual(other) < tol && other.containment_residual(self) < tol
    }
}

/// Column-stacks a square matrix into a vector.
pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for a square matrix of dimension `d`.
pub fn unvectorize(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}
