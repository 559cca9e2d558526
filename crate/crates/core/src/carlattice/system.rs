//! Jordan-Wigner mode operators, the grading, the twist and graded elements.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::linalg::spectral_norm;
use crate::{Error, Result, C64};

/// Largest number of modes accepted. Subspace computations work on the
/// 4^n-dimensional matrix space, so larger systems are impractical.
pub const MAX_MODES: usize = 5;

/// Relative tolerance used to classify an element as even or odd.
pub const GRADE_TOL: f64 = 1e-12;

/// Grade of an element under α = Ad Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GradeTag {
    /// ΓAΓ = A.
    Even,
    /// ΓAΓ = −A.
    Odd,
    /// Neither.
    Mixed,
}

/// Which mode algebra an element is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Generated by left modes only.
    Left,
    /// Generated by right modes only.
    Right,
    /// Anything else.
    Global,
}

/// A dense matrix on the CAR Hilbert space with its grade and side tags.
#[derive(Clone, Debug)]
pub struct CarElement {
    matrix: DMatrix<C64>,
    grade: GradeTag,
    side: Side,
}

impl CarElement {
    /// The matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Consumes the element and returns its matrix.
    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// The grade determined from conjugation by Γ.
    pub fn grade(&self) -> GradeTag {
        self.grade
    }

    /// The side tag.
    pub fn side(&self) -> Side {
        self.side
    }

    /// The same matrix with a different side tag.
    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }
}

/// The three mode regions of the model: modes left of the double cone, the
/// double cone itself and modes right of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regions {
    /// Modes of the left wedge M_x′.
    pub left: Vec<usize>,
    /// Modes of the double cone O.
    pub local: Vec<usize>,
    /// Modes of the right wedge M_y.
    pub right: Vec<usize>,
}

/// n_left + n_right fermionic modes in the Jordan-Wigner representation.
///
/// The basis vector with index b has mode j occupied when bit (n−1−j) of b
/// is set, so mode 0 is the leading tensor factor and index 0 is the Fock
/// vacuum.
#[derive(Clone, Debug)]
pub struct CarSystem {
    n_left: usize,
    n_right: usize,
    modes: Vec<DMatrix<C64>>,
    gamma: DMatrix<C64>,
    twist: DMatrix<C64>,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl CarSystem {
    /// Builds the system; both sides need at least one mode.
    pub fn new(n_left: usize, n_right: usize) -> Result<Self> {
        if n_left == 0 || n_right == 0 {
            return Err(Error::InvalidParameter("n_left and n_right must both be at least 1".into()));
        }
        let n = n_left + n_right;
        if n > MAX_MODES {
            return Err(Error::InvalidParameter(format!("at most {MAX_MODES} modes are supported, got {n}")));
        }
        let lower = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let sz = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]));
        let id2 = DMatrix::<C64>::identity(2, 2);
        let modes = (0..n)
            .map(|j| {
                let mut m = DMatrix::<C64>::identity(1, 1);
                for i in 0..n {
                    let f = if i < j {
                        &sz
                    } else if i == j {
                        &lower
                    } else {
                        &id2
                    };
                    m = m.kronecker(f);
                }
                m
            })
            .collect();
        let mut sys = Self { n_left, n_right, modes, gamma: DMatrix::zeros(0, 0), twist: DMatrix::zeros(0, 0) };
        sys.gamma = sys.parity(&(0..n).collect::<Vec<_>>());
        let dim = sys.dim();
        let id = DMatrix::<C64>::identity(dim, dim);
        sys.twist = &id * C64::new(0.5, -0.5) + &sys.gamma * C64::new(0.5, 0.5);
        Ok(sys)
    }

    /// Number of left modes.
    pub fn n_left(&self) -> usize {
        self.n_left
    }

    /// Number of right modes.
    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Total number of modes.
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Hilbert space dimension 2^n.
    pub fn dim(&self) -> usize {
        1 << self.n_modes()
    }

    /// Indices of the left modes.
    pub fn left_modes(&self) -> Vec<usize> {
        (0..self.n_left).collect()
    }

    /// Indices of the right modes.
    pub fn right_modes(&self) -> Vec<usize> {
        (self.n_left..self.n_modes()).collect()
    }

    /// The region split. With at least two modes on each side the double
    /// cone holds the innermost left and right mode; otherwise it is the set
    /// of right modes and the right wedge is empty.
    pub fn regions(&self) -> Regions {
        let n = self.n_modes();
        if self.n_left >= 2 && self.n_right >= 2 {
            Regions {
                left: (0..self.n_left - 1).collect(),
                local: vec![self.n_left - 1, self.n_left],
                right: (self.n_left + 1..n).collect(),
            }
        } else {
            Regions { left: self.left_modes(), local: self.right_modes(), right: Vec::new() }
        }
    }

    /// The annihilator a_j.
    pub fn annihilator(&self, j: usize) -> &DMatrix<C64> {
        &self.modes[j]
    }

    /// The creator a_j†.
    pub fn creator(&self, j: usize) -> DMatrix<C64> {
        self.modes[j].adjoint()
    }

    /// The number operator a_j†a_j.
    pub fn number(&self, j: usize) -> DMatrix<C64> {
        self.creator(j) * &self.modes[j]
    }

    /// The grading Γ = (−1)^N.
    pub fn gamma(&self) -> &DMatrix<C64> {
        &self.gamma
    }

    /// The twist Z = (1−i)/2 + (1+i)/2 Γ.
    pub fn twist(&self) -> &DMatrix<C64> {
        &self.twist
    }

    /// The identity matrix.
    pub fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    /// The Fock vacuum e_0.
    pub fn vacuum(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim());
        v[0] = c(1.0);
        v
    }

    /// The partial parity ∏_{j ∈ modes} (1 − 2a_j†a_j).
    pub fn parity(&self, modes: &[usize]) -> DMatrix<C64> {
        let id = self.identity();
        modes.iter().fold(id.clone(), |acc, &j| acc * (&id - self.number(j) * c(2.0)))
    }

    /// The generators a_j, a_j† of the CAR algebra over `modes`.
    pub fn generators(&self, modes: &[usize]) -> Vec<DMatrix<C64>> {
        modes.iter().flat_map(|&j| [self.modes[j].clone(), self.creator(j)]).collect()
    }

    /// A linear basis of the CAR algebra over `modes`: the 4^|modes|
    /// ordered monomials with one factor from {1, a_j, a_j†, a_j†a_j} per mode.
    pub fn algebra_basis(&self, modes: &[usize]) -> Vec<DMatrix<C64>> {
        let mut out = vec![self.identity()];
        for &j in modes {
            let factors = [self.identity(), self.modes[j].clone(), self.creator(j), self.number(j)];
            out = out.iter().flat_map(|m| factors.iter().map(move |f| m * f)).collect();
        }
        out
    }

    /// A random element of the CAR algebra over `modes`: real and imaginary
    /// parts of the monomial coefficients are uniform on [−½, ½].
    pub fn random_in(&self, modes: &[usize], rng: &mut impl Rng) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for b in self.algebra_basis(modes) {
            out += b * C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        out
    }

    /// Side tag of an algebra generated by `modes`.
    pub fn side_of(&self, modes: &[usize]) -> Side {
        if !modes.is_empty() && modes.iter().all(|&j| j < self.n_left) {
            Side::Left
        } else if !modes.is_empty() && modes.iter().all(|&j| j >= self.n_left) {
            Side::Right
        } else {
            Side::Global
        }
    }

    /// Wraps a matrix as an element, determining its grade.
    pub fn element(&self, matrix: DMatrix<C64>, side: Side) -> Result<CarElement> {
        if matrix.nrows() != self.dim() || matrix.ncols() != self.dim() {
            return Err(Error::Shape(format!(
                "CAR element must be {0}×{0}, got {1}×{2}",
                self.dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let grade = self.grade_of(&matrix);
        Ok(CarElement { matrix, grade, side })
    }

    /// The element a_j, tagged by the side of mode j.
    pub fn annihilator_element(&self, j: usize) -> CarElement {
        CarElement { matrix: self.modes[j].clone(), grade: GradeTag::Odd, side: self.side_of(&[j]) }
    }

    /// Grade of a matrix from the relative size of A ∓ ΓAΓ.
    pub fn grade_of(&self, a: &DMatrix<C64>) -> GradeTag {
        let scale = a.norm();
        if scale == 0.0 {
            return GradeTag::Even;
        }
        let conj = &self.gamma * a * &self.gamma;
        if (&conj - a).norm() <= GRADE_TOL * scale {
            GradeTag::Even
        } else if (&conj + a).norm() <= GRADE_TOL * scale {
            GradeTag::Odd
        } else {
            GradeTag::Mixed
        }
    }

    /// α(A) = ΓAΓ.
    pub fn alpha(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        &self.gamma * a * &self.gamma
    }

    /// Largest operator-norm residual of the canonical anticommutation relations.
    pub fn car_residual(&self) -> f64 {
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for i in 0..self.n_modes() {
            for j in 0..self.n_modes() {
                let (ai, aj) = (&self.modes[i], &self.modes[j]);
                let adj = aj.adjoint();
                let mut mixed = ai * &adj + &adj * ai;
                if i == j {
                    mixed -= &id;
                }
                worst = worst.max(spectral_norm(&mixed)).max(spectral_norm(&(ai * aj + aj * ai)));
            }
        }
        worst
    }

    /// Largest residual of Γa_jΓ = −a_j, Γ² = 1 and ΓΩ = Ω.
    pub fn grading_residual(&self) -> f64 {
        let mut worst = spectral_norm(&(&self.gamma * &self.gamma - self.identity()));
        for a in &self.modes {
            worst = worst.max(spectral_norm(&(self.alpha(a) + a)));
        }
        let omega = self.vacuum();
        worst.max((&self.gamma * &omega - omega).norm())
    }
}

/// Operator norm of a − b.
pub(crate) fn diff_norm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    spectral_norm(&(a - b))
}
