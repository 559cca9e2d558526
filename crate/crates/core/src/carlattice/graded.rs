//! Even/odd splitting, the twist A ↦ ZAZ* and the graded permutation identity.

use nalgebra::DMatrix;

use super::system::{diff_norm, CarElement, CarSystem, GradeTag};
use crate::fockspace::tensor::inversions;
use crate::linalg::spectral_norm;
use crate::{Error, Result, C64};

/// Tolerance, relative to ‖A_j‖‖A_k‖, for the twisted commutation
/// precondition of [`verify_graded_permute`].
pub const TWISTED_COMMUTANT_TOL: f64 = 1e-10;

/// A₊ = (A + ΓAΓ)/2 and A₋ = (A − ΓAΓ)/2, both carrying the side tag of A.
pub fn graded_split(sys: &CarSystem, a: &CarElement) -> (CarElement, CarElement) {
    let conj = sys.alpha(a.matrix());
    let half = C64::new(0.5, 0.0);
    let plus = (a.matrix() + &conj) * half;
    let minus = (a.matrix() - &conj) * half;
    let wrap = |m: DMatrix<C64>| sys.element(m, a.side()).expect("split parts keep the system dimension");
    (wrap(plus), wrap(minus))
}

/// Aᵗ = ZAZ*.
pub fn twist_conjugate(sys: &CarSystem, a: &CarElement) -> CarElement {
    let z = sys.twist();
    sys.element(z * a.matrix() * z.adjoint(), a.side()).expect("twist keeps the system dimension")
}

/// Residual of the graded permutation identity
///
/// A_{σ(1)}⋯A_{σ(n)} = Σ_s ∏_{j<k, σ(j)>σ(k)} (−1)^{(1−s_{σ(j)})(1−s_{σ(k)})/4} α_{s_1}(A_1)⋯α_{s_n}(A_n)
///
/// in operator norm. `sigma` is a permutation of 0..n. Every element must
/// have a pure grade and each pair must lie in each other's twisted
/// commutant, i.e. A_j commutes with A_kᵗ.
pub fn verify_graded_permute(sys: &CarSystem, elements: &[CarElement], sigma: &[usize]) -> Result<f64> {
    let n = elements.len();
    let mut seen = vec![false; n];
    if sigma.len() != n || !sigma.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true)) {
        return Err(Error::InvalidParameter(format!("{sigma:?} is not a permutation of {n} elements")));
    }
    for (j, a) in elements.iter().enumerate() {
        if a.grade() == GradeTag::Mixed {
            return Err(Error::GradeSide(format!("element {j} has mixed grade")));
        }
    }
    for (j, a) in elements.iter().enumerate() {
        for (k, b) in elements.iter().enumerate() {
            if j == k {
                continue;
            }
            let bt = twist_conjugate(sys, b);
            let comm = a.matrix() * bt.matrix() - bt.matrix() * a.matrix();
            let scale = spectral_norm(a.matrix()) * spectral_norm(b.matrix());
            if spectral_norm(&comm) > TWISTED_COMMUTANT_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::GradeSide(format!(
                    "element {j} ({:?}) is not in the twisted commutant of element {k} ({:?})",
                    a.side(),
                    b.side()
                )));
            }
        }
    }
    let lhs = sigma.iter().fold(sys.identity(), |acc, &k| acc * elements[k].matrix());
    let parts: Vec<[DMatrix<C64>; 2]> = elements
        .iter()
        .map(|a| {
            let (p, m) = graded_split(sys, a);
            [p.into_matrix(), m.into_matrix()]
        })
        .collect();
    // Inverted pairs, given by the labels of the exchanged elements.
    let exchanged: Vec<(usize, usize)> = inversions(sigma).into_iter().map(|(j, k)| (sigma[j], sigma[k])).collect();
    let mut rhs = DMatrix::<C64>::zeros(sys.dim(), sys.dim());
    for bits in 0..1usize << n {
        // Bit j set selects the odd part of A_j (s_j = −1).
        let odd = |j: usize| bits >> j & 1 == 1;
        let sign = exchanged.iter().filter(|&&(a, b)| odd(a) && odd(b)).count();
        let term = (0..n).fold(sys.identity(), |acc, j| acc * &parts[j][usize::from(odd(j))]);
        if sign % 2 == 0 {
            rhs += term;
        } else {
            rhs -= term;
        }
    }
    Ok(diff_norm(&lhs, &rhs))
}
