//! Dense operators on the truncated Fock space and matrix-free norms.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::fockspace::{minkowski, twist_eigenvalue, FockBasis, FockState};
use crate::linalg::{norm_from_gram, spectral_norm};
use crate::C64;

/// A linear map on Fock states.
///
/// Implemented by dense [`FockOperator`]s and by any closure, so matrix-free
/// field operators and dense matrices can be mixed in norm computations.
pub trait FockMap {
    /// Applies the map.
    fn apply_to(&self, state: &FockState) -> FockState;
}

impl<F: Fn(&FockState) -> FockState> FockMap for F {
    fn apply_to(&self, state: &FockState) -> FockState {
        self(state)
    }
}

/// Parity of an operator with respect to Γ = (−1)^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    /// Commutes with Γ.
    Even,
    /// Anticommutes with Γ.
    Odd,
    /// Neither.
    Mixed,
}

/// Operator norm of a linear map restricted to the span of the basis vectors
/// of sectors 0..=max_sector of `basis`.
///
/// The map is applied to each basis vector and the square root of the
/// largest eigenvalue of the Gram matrix of the images is returned.
pub fn map_norm(basis: &FockBasis, max_sector: usize, map: &dyn FockMap) -> f64 {
    let cols: Vec<FockState> = (0..basis.dim_up_to(max_sector)).map(|i| map.apply_to(&basis.state(i))).collect();
    let k = cols.len();
    let mut g = DMatrix::<C64>::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = cols[a].inner(&cols[b]);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    norm_from_gram(&g)
}

/// Dense matrix of an operator in an orthonormal [`FockBasis`], with grade tag.
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<C64>,
    grade: Grade,
}

/// Entries below this magnitude (relative to the largest) are ignored when
/// detecting the grade.
const GRADE_TOL: f64 = 1e-12;

impl FockOperator {
    /// Wraps a matrix, detecting its grade.
    pub fn from_matrix(basis: Arc<FockBasis>, matrix: DMatrix<C64>) -> Self {
        assert_eq!(matrix.nrows(), basis.dim());
        assert_eq!(matrix.ncols(), basis.dim());
        let grade = detect_grade(&basis, &matrix);
        Self { basis, matrix, grade }
    }

    /// Matrix of a linear map, obtained by applying it to every basis vector.
    pub fn from_linear_map(basis: Arc<FockBasis>, map: &dyn FockMap) -> Self {
        let d = basis.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for j in 0..d {
            let col = basis.coords(&map.apply_to(&basis.state(j)));
            m.set_column(j, &col);
        }
        Self::from_matrix(basis, m)
    }

    /// Diagonal operator with the given eigenvalue per basis vector.
    pub fn from_diagonal(basis: Arc<FockBasis>, eig: impl Fn(usize) -> C64) -> Self {
        let d = basis.dim();
        let m = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| eig(i)));
        Self::from_matrix(basis, m)
    }

    /// The identity.
    pub fn identity(basis: Arc<FockBasis>) -> Self {
        Self::from_diagonal(basis, |_| C64::new(1.0, 0.0))
    }

    /// Γ = (−1)^N.
    pub fn grading(basis: Arc<FockBasis>) -> Self {
        let b = basis.clone();
        Self::from_diagonal(basis, move |i| C64::new(if b.vector(i).sector % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
    }

    /// Z = (1−i)/2 + (1+i)/2 Γ.
    pub fn twist(basis: Arc<FockBasis>) -> Self {
        let b = basis.clone();
        Self::from_diagonal(basis, move |i| twist_eigenvalue(b.vector(i).sector))
    }

    /// Number operator N.
    pub fn number(basis: Arc<FockBasis>) -> Self {
        let b = basis.clone();
        Self::from_diagonal(basis, move |i| C64::new(b.vector(i).sector as f64, 0.0))
    }

    /// Translation U(x), diagonal with eigenvalue exp(i P·x).
    pub fn translate(basis: Arc<FockBasis>, x: [f64; 2]) -> Self {
        let b = basis.clone();
        Self::from_diagonal(basis, move |i| C64::from_polar(1.0, minkowski(b.total_momentum(i), x)))
    }

    /// Hamiltonian H with eigenvalue Σ_j μ cosh θ_j.
    pub fn hamiltonian(basis: Arc<FockBasis>) -> Self {
        let b = basis.clone();
        Self::from_diagonal(basis, move |i| C64::new(b.total_momentum(i)[0], 0.0))
    }

    /// The basis.
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// The dense matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Grade tag.
    pub fn grade(&self) -> Grade {
        self.grade
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Applies the operator to a state (through its basis coordinates).
    pub fn apply(&self, state: &FockState) -> FockState {
        self.basis.state_from_coords(&(&self.matrix * self.basis.coords(state)))
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.adjoint(), grade: self.grade }
    }

    /// Operator product self · other.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(self.basis.clone(), &self.matrix * &other.matrix)
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        Self::from_matrix(self.basis.clone(), &self.matrix + &other.matrix)
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        Self::from_matrix(self.basis.clone(), &self.matrix - &other.matrix)
    }

    /// Scalar multiple.
    pub fn scale(&self, c: C64) -> Self {
        Self { basis: self.basis.clone(), matrix: &self.matrix * c, grade: self.grade }
    }

    /// Anticommutator AB + BA.
    pub fn anticommutator(&self, other: &Self) -> Self {
        Self::from_matrix(self.basis.clone(), &self.matrix * &other.matrix + &other.matrix * &self.matrix)
    }

    /// Commutator AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix(self.basis.clone(), &self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// Spectral norm of the operator restricted to sectors 0..=max_sector.
    pub fn restricted_norm(&self, max_sector: usize) -> f64 {
        let k = self.basis.dim_up_to(max_sector);
        spectral_norm(&self.matrix.columns(0, k).into_owned())
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl FockMap for FockOperator {
    fn apply_to(&self, state: &FockState) -> FockState {
        self.apply(state)
    }
}

fn detect_grade(basis: &FockBasis, m: &DMatrix<C64>) -> Grade {
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Grade::Even;
    }
    let mut even_part: f64 = 0.0;
    let mut odd_part: f64 = 0.0;
    for j in 0..m.ncols() {
        let pj = basis.vector(j).sector % 2;
        for i in 0..m.nrows() {
            let v = m[(i, j)].norm();
            if basis.vector(i).sector % 2 == pj {
                even_part = even_part.max(v);
            } else {
                odd_part = odd_part.max(v);
            }
        }
    }
    match (even_part <= GRADE_TOL * scale, odd_part <= GRADE_TOL * scale) {
        (_, true) => Grade::Even,
        (true, false) => Grade::Odd,
        _ => Grade::Mixed,
    }
}
