//! Bounded approximants C_ε = V ε⁻¹ sin(ε|T|) of an operator T = V|T|.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linalg::spectral_norm;
use crate::{Error, Result, C64};

/// C_ε = V ε⁻¹ sin(ε|T|) from the polar decomposition T = V|T|.
///
/// With the singular value decomposition T = U Σ W* one has V|T| = U Σ W*
/// and therefore C_ε = U diag(sin(εσ)/ε) W*.
pub fn sin_approximant(t: &DMatrix<C64>, eps: f64) -> Result<DMatrix<C64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    if t.is_empty() {
        return Ok(t.clone());
    }
    let svd = t.clone().svd(true, true);
    let u = svd.u.expect("requested left singular vectors");
    let w_adj = svd.v_t.expect("requested right singular vectors");
    let mut scaled = u;
    for (j, &s) in svd.singular_values.iter().enumerate() {
        let f = (eps * s).sin() / eps;
        scaled.column_mut(j).scale_mut(f);
    }
    Ok(scaled * w_adj)
}

/// The two bounds on C_ε, measured on a set of vectors.
#[derive(Clone, Debug, Serialize)]
pub struct SinBounds {
    /// ε.
    pub eps: f64,
    /// ε‖C_ε‖, at most 1.
    pub norm_ratio: f64,
    /// Largest ‖(T − C_ε)Ψ‖ / (ε‖T*TΨ‖) over the vectors with T*TΨ ≠ 0, at most 1.
    pub margin: f64,
    /// Largest ‖(T − C_ε)Ψ‖ over the vectors with T*TΨ = 0, which must vanish.
    pub kernel_residual: f64,
    /// Both bounds hold up to rounding.
    pub holds: bool,
}

/// Checks ‖C_ε‖ ≤ ε⁻¹ and ‖(T − C_ε)Ψ‖ ≤ ε‖T*TΨ‖ for every Ψ in `vectors`.
pub fn sin_bounds(t: &DMatrix<C64>, eps: f64, vectors: &[DVector<C64>]) -> Result<SinBounds> {
    let c = sin_approximant(t, eps)?;
    let diff = t - &c;
    let gram = t.adjoint() * t;
    let scale = spectral_norm(t).max(1.0);
    let mut margin: f64 = 0.0;
    let mut kernel_residual: f64 = 0.0;
    for psi in vectors {
        if psi.len() != t.ncols() {
            return Err(Error::Shape(format!("vector of length {} for a matrix with {} columns", psi.len(), t.ncols())));
        }
        let lhs = (&diff * psi).norm();
        let rhs = eps * (&gram * psi).norm();
        if rhs > 1e-12 * scale * scale * psi.norm() {
            margin = margin.max(lhs / rhs);
        } else {
            kernel_residual = kernel_residual.max(lhs);
        }
    }
    let norm_ratio = eps * spectral_norm(&c);
    let rounding = 1e-12;
    let holds = norm_ratio <= 1.0 + rounding && margin <= 1.0 + rounding && kernel_residual <= 1e-10 * scale;
    Ok(SinBounds { eps, norm_ratio, margin, kernel_residual, holds })
}
