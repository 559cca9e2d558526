//! Quadrature rules for complex-valued integrands.
//!
//! [`integrate`] is a globally adaptive 7/15-point Gauss–Kronrod scheme: the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets the requested tolerance. [`circle_trapezoid`] integrates
//! around a circle, where the trapezoid rule converges geometrically for
//! functions analytic in an annulus around the contour.

use crate::{Error, Result, C64};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (relative to the magnitude of the result).
    pub rel_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 4000 }
    }
}

impl QuadOptions {
    /// Options with the given absolute tolerance and no relative target.
    pub fn absolute(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }
}

/// One Gauss–Kronrod panel: returns (Kronrod estimate, error estimate).
fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Integrates a complex function over `[a, b]` with adaptive Gauss–Kronrod.
///
/// Returns [`Error::QuadratureNonConvergence`] when the tolerance is not met
/// within `opts.max_intervals` subintervals.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, C64, f64)> = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return Ok(total);
        }
        if parts.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence { a, b, error: err, tol: target });
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (pa, pb, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (lv, le) = gk15(&mut f, pa, mid);
        let (rv, re) = gk15(&mut f, mid, pb);
        total += lv + rv - pv;
        err += le + re - pe;
        parts.push((pa, mid, lv, le));
        parts.push((mid, pb, rv, re));
        // Re-sum occasionally to keep cancellation drift out of the estimates.
        if parts.len() % 64 == 0 {
            total = parts.iter().map(|p| p.2).sum();
            err = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// Integrates `f` over the circle `|ζ − center| = radius` (counter-clockwise)
/// with the `n`-point trapezoid rule, i.e. approximates ∮ f(ζ) dζ.
pub fn circle_trapezoid<F: FnMut(C64) -> Result<C64>>(mut f: F, center: C64, radius: f64, n: usize) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
        let z = center + phase * radius;
        // dζ = i r e^{iφ} dφ, dφ = 2π/n
        acc += f(z)? * phase * crate::I * radius;
    }
    Ok(acc * (2.0 * std::f64::consts::PI / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::re;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| re(x.powi(5) - 3.0 * x * x), -1.0, 2.0, QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v.re - exact).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn oscillatory_gaussian_matches_closed_form() {
        // ∫ e^{-x²/2} e^{ikx} dx = √(2π) e^{-k²/2}
        let k = 3.0;
        let v = integrate(|x| C64::from_polar((-0.5 * x * x).exp(), k * x), -12.0, 12.0, QuadOptions::absolute(1e-13)).unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * k * k).exp();
        assert!((v - re(exact)).norm() < 1e-12);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 0.0, max_intervals: 4 };
        let r = integrate(|x| re(1.0 / x.abs().sqrt()), 0.0, 1.0, opts);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn circle_residue_of_simple_pole() {
        let v = circle_trapezoid(|z| Ok(C64::new(1.0, 0.0) / (z - C64::new(0.2, 0.1))), C64::new(0.2, 0.1), 0.01, 64).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI * crate::I).norm() < 1e-13);
    }
}
