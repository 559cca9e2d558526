//! Discrete series expansion of operators in creators and annihilators.
//!
//! On the rapidity grid an operator is written as
//!
//! A = Σ_{m,n} ∫ d^mθ d^nη /(m! n!) f_{m,n}(θ, η) z†(θ_1)…z†(θ_m) z(η_1)…z(η_n),
//!
//! with the integrals realized as Δθ-weighted node sums and z(θ_k) = z(e_k/Δθ).
//! Coefficients are flat tensors of rank m+n over the grid nodes, θ indices
//! first. The extraction inverts the series triangularly: the m-particle
//! component of A applied to z†(η_n)…z†(η_1)Ω only receives contributions from
//! the terms (m−c, n−c), c ≥ 0, so the coefficients are peeled off in order
//! of increasing min(m, n).

use std::collections::BTreeMap;

use crate::fockspace::tensor::{factorial, tensor_len, unflatten};
use crate::fockspace::{FockMap, FockSpace, FockState};
use crate::{Error, Result, C64};

/// Coefficient tensors f_{m,n} keyed by (m, n).
pub type Coefficients = BTreeMap<(usize, usize), Vec<C64>>;

/// The vector z†(δ_{η_n})…z†(δ_{η_1})Ω for a multi-index η.
fn reversed_creation_ket(space: &FockSpace, eta: &[usize]) -> Result<FockState> {
    let mut ket = space.vacuum();
    for &k in eta {
        ket = space.create_at(k, &ket)?;
    }
    Ok(ket)
}

fn check_order(space: &FockSpace, m: usize, n: usize) -> Result<()> {
    if m + n > space.n_max() {
        return Err(Error::Truncation(format!(
            "coefficient f_{{{m},{n}}} needs m + n ≤ N_max = {}",
            space.n_max()
        )));
    }
    Ok(())
}

/// Applies the single series term with coefficient `f` (rank m+n) to a state.
///
/// For an N-particle input the result lives in sector N − n + m and reads
/// √((N−n+m)!/(N−n)!) √(N!/(N−n)!) /(m! n!) · Δθⁿ · P[Σ_η f(θ, η) Φ_N(η_n, …, η_1, ·)].
/// Output sectors beyond N_max are dropped.
pub fn apply_term(space: &FockSpace, m: usize, n: usize, f: &[C64], phi: &FockState) -> Result<FockState> {
    let np = space.n_points();
    if f.len() != tensor_len(np, m + n) {
        return Err(Error::Shape(format!("f_{{{m},{n}}} over {np} nodes needs {} entries", tensor_len(np, m + n))));
    }
    let mut out = space.zero_state();
    let dn = space.dtheta().powi(n as i32);
    let tn = tensor_len(np, n);
    let tm = tensor_len(np, m);
    let mut eta = vec![0usize; n];
    for big_n in n..=space.n_max() {
        let target = big_n - n + m;
        if target > space.n_max() {
            break;
        }
        let src = phi.sector(big_n);
        if src.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let rest_len = tensor_len(np, big_n - n);
        let coeff = (factorial(target) / factorial(big_n - n)).sqrt() * (factorial(big_n) / factorial(big_n - n)).sqrt()
            / (factorial(m) * factorial(n))
            * dn;
        // Φ_N(rev η, r) with the reversed η block leading.
        let mut contracted = vec![C64::new(0.0, 0.0); tm * rest_len];
        for e in 0..tn {
            unflatten(e, np, &mut eta);
            let rev = eta.iter().rev().fold(0, |acc, &k| acc * np + k);
            let block = &src[rev * rest_len..(rev + 1) * rest_len];
            for t in 0..tm {
                let c = f[t * tn + e];
                if c.norm() == 0.0 {
                    continue;
                }
                let dst = &mut contracted[t * rest_len..(t + 1) * rest_len];
                for (d, s) in dst.iter_mut().zip(block) {
                    *d += c * s;
                }
            }
        }
        let sym = space.s_symmetrize(target, &contracted)?;
        for (d, s) in out.sector_mut(target).iter_mut().zip(sym) {
            *d += s * coeff;
        }
    }
    Ok(out)
}

/// The truncated operator Σ_{(m,n)} term_{m,n}(f_{m,n}) built from coefficients.
pub fn operator_from_coefficients<'a>(space: &'a FockSpace, coefficients: &'a Coefficients) -> impl FockMap + 'a {
    move |phi: &FockState| {
        let mut out = space.zero_state();
        for (&(m, n), f) in coefficients {
            let term = apply_term(space, m, n, f, phi).expect("coefficient shapes are validated on construction");
            out.axpy(C64::new(1.0, 0.0), &term);
        }
        out
    }
}

/// Validates coefficient shapes and orders against the space.
pub fn check_coefficients(space: &FockSpace, coefficients: &Coefficients) -> Result<()> {
    for (&(m, n), f) in coefficients {
        check_order(space, m, n)?;
        if f.len() != tensor_len(space.n_points(), m + n) {
            return Err(Error::Shape(format!("f_{{{m},{n}}} has {} entries", f.len())));
        }
    }
    Ok(())
}

/// Extracts f_{m,n}[A] on the grid nodes, computing the lower coefficients
/// (m−c, n−c) it depends on along the way.
pub fn coefficients_from_operator(space: &FockSpace, a: &dyn FockMap, m: usize, n: usize) -> Result<Vec<C64>> {
    let mut memo = Coefficients::new();
    extract(space, a, m, n, &mut memo)?;
    Ok(memo.remove(&(m, n)).expect("extracted coefficient is memoized"))
}

/// Extracts every coefficient with m + n ≤ `order`.
pub fn all_coefficients(space: &FockSpace, a: &dyn FockMap, order: usize) -> Result<Coefficients> {
    let mut memo = Coefficients::new();
    for total in 0..=order {
        for m in 0..=total {
            extract(space, a, m, total - m, &mut memo)?;
        }
    }
    Ok(memo)
}

fn extract(space: &FockSpace, a: &dyn FockMap, m: usize, n: usize, memo: &mut Coefficients) -> Result<()> {
    check_order(space, m, n)?;
    if memo.contains_key(&(m, n)) {
        return Ok(());
    }
    for c in 1..=m.min(n) {
        extract(space, a, m - c, n - c, memo)?;
    }
    let np = space.n_points();
    let tn = tensor_len(np, n);
    let tm = tensor_len(np, m);
    let root = factorial(m).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); tm * tn];
    let mut eta = vec![0usize; n];
    for e in 0..tn {
        unflatten(e, np, &mut eta);
        let ket = reversed_creation_ket(space, &eta)?;
        let mut image = a.apply_to(&ket);
        for c in 1..=m.min(n) {
            let lower = &memo[&(m - c, n - c)];
            let term = apply_term(space, m - c, n - c, lower, &ket)?;
            image.axpy(C64::new(-1.0, 0.0), &term);
        }
        // ⟨z†(δ_{θ_1})…z†(δ_{θ_m})Ω, Ψ⟩ = √m! Ψ_m(θ) for S-symmetric Ψ.
        for (t, v) in image.sector(m).iter().enumerate() {
            out[t * tn + e] = v * root;
        }
    }
    memo.insert((m, n), out);
    Ok(())
}
