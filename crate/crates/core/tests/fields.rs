//! Integration tests for test functions, field operators and locality scans.

mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use zfqft_core::fields::{
    bump_transform, commutator_norm, graded_commutator_norm, majorana, majorana_amplitude, mass_shell_restrict, phi,
    phi_hat, phi_prime, wedge_locality_report, LocalityPair, Sign, TestFunction,
};
use zfqft_core::fockspace::{FockBasis, FockOperator, FockSpace, RapidityGrid};
use zfqft_core::smatrix::ScatteringFunction;
use zfqft_core::{Error, C64, I};

fn dense_basis(space: &FockSpace) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(space))
}

fn random_gaussian(rng: &mut impl Rng) -> TestFunction {
    TestFunction::gaussian(
        [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        [rng.gen_range(0.3..0.8), rng.gen_range(0.3..0.8)],
    )
}

/// Closed-form Gaussian transform, written out independently of the library.
fn gaussian_oracle(c: [f64; 2], w: [f64; 2], p: [f64; 2]) -> C64 {
    let phase = C64::new(0.0, p[0] * c[0] - p[1] * c[1]).exp();
    phase * w[0] * w[1] * (-(w[0] * w[0] * p[0] * p[0] + w[1] * w[1] * p[1] * p[1]) / 2.0).exp()
}

#[test]
fn gaussian_restriction_matches_closed_form() {
    let grid = RapidityGrid::new(-2.0, 2.0, 17, 1.3).unwrap();
    let (c, w) = ([0.2, -0.4], [0.5, 0.7]);
    let f = TestFunction::gaussian(c, w);
    for (sign, s) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
        let v = mass_shell_restrict(&grid, &f, sign);
        for (k, vk) in v.iter().enumerate() {
            let th = grid.node(k);
            let p = [s * 1.3 * th.cosh(), s * 1.3 * th.sinh()];
            assert!((vk - gaussian_oracle(c, w, p)).norm() < 1e-15);
        }
    }
}

#[test]
fn translation_covariance_of_restriction() {
    let grid = RapidityGrid::new(-2.0, 2.0, 21, 1.0).unwrap();
    let fs = [TestFunction::gaussian([0.1, 0.3], [0.4, 0.6]), TestFunction::bump([0.0, 0.2], [0.5, 0.4])];
    let a = [0.7, -1.1];
    for f in fs {
        let base = mass_shell_restrict(&grid, &f, Sign::Plus);
        let moved = mass_shell_restrict(&grid, &f.translated(a), Sign::Plus);
        for k in 0..grid.len() {
            let p = grid.momentum(k);
            let phase = C64::new(0.0, p[0] * a[0] - p[1] * a[1]).exp();
            assert!((moved[k] - phase * base[k]).norm() < 1e-13);
        }
    }
}

#[test]
fn bump_transform_matches_trapezoid_oracle() {
    // The bump is smooth with all derivatives vanishing at ±1, so the
    // trapezoid rule converges faster than any power.
    let trapezoid = |k: C64| {
        let n = 4000;
        let h = 2.0 / n as f64;
        (1..n)
            .map(|i| {
                let u = -1.0 + i as f64 * h;
                (I * k * u).exp() * (-1.0 / (1.0 - u * u)).exp()
            })
            .sum::<C64>()
            * h
    };
    for k in [C64::new(0.0, 0.0), C64::new(3.0, 0.0), C64::new(-7.5, 0.0), C64::new(2.0, 1.5), C64::new(0.5, -4.0)] {
        let got = bump_transform(k).unwrap();
        assert!((got - trapezoid(k)).norm() < 1e-11, "k = {k}");
    }
}

proptest! {
    #[test]
    fn real_functions_have_hermitian_transforms(
        c0 in -2.0..2.0f64, c1 in -2.0..2.0f64, w0 in 0.2..1.0f64, w1 in 0.2..1.0f64,
        p0 in -4.0..4.0f64, p1 in -4.0..4.0f64, bump in proptest::bool::ANY,
    ) {
        let f = if bump { TestFunction::bump([c0, c1], [w0, w1]) } else { TestFunction::gaussian([c0, c1], [w0, w1]) };
        let a = f.fourier([p0, p1]);
        let b = f.fourier([-p0, -p1]);
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }
}

#[test]
fn phi_on_vacuum_and_one_particle_matrix_elements() {
    let sp = common::space(ScatteringFunction::sinh_factor(0.6), 10, 3);
    let f = TestFunction::gaussian([0.3, -0.2], [0.5, 0.4]);
    let field = phi(&sp, &f);
    let out = field.apply(&sp.vacuum());
    let fplus = mass_shell_restrict(sp.grid(), &f, Sign::Plus);
    assert!(common::max_diff(out.sector(1), &fplus) < 1e-15);
    assert!(out.sector(0)[0].norm() == 0.0 && out.sector(2).iter().all(|x| x.norm() == 0.0));
    let mut rng = common::rng(3);
    let psi = common::random_vector(&mut rng, 10);
    let lhs = sp.one_particle(&psi).unwrap().inner(&out);
    let direct: C64 = psi.iter().zip(&fplus).map(|(a, b)| a.conj() * b).sum::<C64>() * sp.dtheta();
    assert!((lhs - direct).norm() < 1e-14);
}

#[test]
fn fields_are_odd_and_self_adjoint() {
    let f = TestFunction::gaussian([0.2, 0.1], [0.5, 0.6]);
    for s in common::all_s() {
        let sp = common::space(s.clone(), 6, 3);
        let basis = dense_basis(&sp);
        let gamma = FockOperator::grading(basis.clone());
        let mut ops = vec![phi(&sp, &f).dense(basis.clone()), phi_prime(&sp, &f).dense(basis.clone())];
        if s.is_constant(-1.0) {
            for c in [Sign::Plus, Sign::Minus] {
                ops.push(majorana(&sp, &f, c).unwrap().dense(basis.clone()));
            }
        }
        for op in ops {
            assert!(op.sub(&op.adjoint()).max_abs() < 1e-12, "{}", s.descriptor());
            let conj = gamma.compose(&op).compose(&gamma);
            assert!(conj.add(&op).max_abs() == 0.0);
            assert_eq!(op.grade(), zfqft_core::fockspace::Grade::Odd);
        }
    }
}

#[test]
fn twisted_field_is_i_gamma_phi_prime() {
    let mut rng = common::rng(11);
    for s in [ScatteringFunction::sinh_factor(0.9), ScatteringFunction::minus_one()] {
        let sp = common::space(s, 6, 3);
        let basis = dense_basis(&sp);
        let gamma = FockOperator::grading(basis.clone());
        for _ in 0..10 {
            let f = random_gaussian(&mut rng);
            let hat = phi_hat(&sp, &f).dense(basis.clone());
            let prime = phi_prime(&sp, &f).dense(basis.clone());
            let expected = gamma.compose(&prime).scale(I);
            assert!(hat.sub(&expected).norm() < 1e-13);
            // Squares agree because Γ anticommutes with the odd φ′.
            assert!(hat.compose(&hat).sub(&prime.compose(&prime)).norm() < 1e-12);
        }
    }
}

#[test]
fn translation_covariance_of_phi() {
    let sp = common::space(ScatteringFunction::product(vec![0.4, 2.2]), 6, 3);
    let basis = dense_basis(&sp);
    let f = TestFunction::gaussian([0.0, 0.3], [0.4, 0.5]);
    let x = [0.6, -0.8];
    let u = FockOperator::translate(basis.clone(), x);
    let lhs = u.compose(&phi(&sp, &f).dense(basis.clone())).compose(&u.adjoint());
    let rhs = phi(&sp, &f.translated(x)).dense(basis);
    assert!(lhs.sub(&rhs).norm() < 1e-12);
}

#[test]
fn free_two_point_function() {
    let sp = common::space(ScatteringFunction::one(), 12, 2);
    let (cf, wf, cg, wg) = ([0.1, -0.5], [0.5, 0.4], [0.3, 0.8], [0.6, 0.5]);
    let f = TestFunction::gaussian(cf, wf);
    let g = TestFunction::gaussian(cg, wg);
    let omega = sp.vacuum();
    let v = phi(&sp, &f).apply(&phi_prime(&sp, &g).apply(&omega));
    let got = omega.inner(&v);
    // ⟨Ω, φ(f) φ′(g) Ω⟩ = ∫ f̃(−p(θ)) g̃(p(θ)) dθ on the grid.
    let grid = sp.grid();
    let expected: C64 = (0..grid.len())
        .map(|k| {
            let p = grid.momentum(k);
            gaussian_oracle(cf, wf, [-p[0], -p[1]]) * gaussian_oracle(cg, wg, p)
        })
        .sum::<C64>()
        * grid.spacing();
    assert!((got - expected).norm() < 1e-14);
}

#[test]
fn majorana_vacuum_vector_and_square() {
    let sp = common::space(ScatteringFunction::minus_one(), 8, 3);
    let f = TestFunction::gaussian([0.2, 0.1], [0.5, 0.6]);
    let basis = Arc::new(FockBasis::up_to(&sp, 2).unwrap());
    for c in [Sign::Plus, Sign::Minus] {
        let psi = majorana(&sp, &f, c).unwrap();
        let one = psi.apply(&sp.vacuum());
        let s = c.value();
        let ftilde = mass_shell_restrict(sp.grid(), &f, Sign::Plus);
        for k in 0..8 {
            let th = sp.grid().node(k);
            let expected = C64::from_polar(1.0, std::f64::consts::PI * (-2.0 + s) / 4.0) * (s * th / 2.0).exp() * ftilde[k];
            assert!((one.sector(1)[k] - expected).norm() < 1e-15);
        }
        let a = majorana_amplitude(sp.grid(), &f, c);
        let norm2: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>() * sp.dtheta();
        // ψ² = ‖a‖² on every sector whose image stays inside the truncation.
        for i in 0..basis.dim() {
            let u = basis.state(i);
            let sq = psi.apply(&psi.apply(&u));
            let diff = &sq - &(&u * norm2);
            assert!(diff.norm() < 1e-10, "column {i}");
        }
    }
}

#[test]
fn majorana_requires_minus_one() {
    let sp = common::space(ScatteringFunction::one(), 4, 2);
    let f = TestFunction::gaussian([0.0, 0.0], [0.5, 0.5]);
    assert!(matches!(majorana(&sp, &f, Sign::Plus), Err(Error::WrongScatteringFunction(_))));
}

#[test]
fn graded_commutator_checks_grades() {
    let sp = common::space(ScatteringFunction::sinh_factor(0.5), 6, 3);
    let f = TestFunction::gaussian([0.0, 0.0], [0.5, 0.5]);
    let a = phi(&sp, &f);
    let basis = dense_basis(&sp);
    let gamma = FockOperator::grading(basis.clone());
    assert!(matches!(graded_commutator_norm(&sp, &a, &gamma), Err(Error::GradeMismatch(_))));
    // {φ, φ} = 2φ², measured on sectors ≤ N_max − 2.
    let got = graded_commutator_norm(&sp, &a, &a).unwrap();
    let dense = a.dense(basis);
    let sq = dense.compose(&dense).scale(C64::new(2.0, 0.0));
    let expected = sq.restricted_norm(1);
    assert!(got > 0.0 && (got - expected).abs() < 1e-10 * expected);
}

#[test]
fn overlapping_supports_give_order_one() {
    let sp = common::space(ScatteringFunction::sinh_factor(0.8), 10, 3);
    let f = TestFunction::gaussian([0.0, 0.0], [0.5, 0.5]);
    let v = graded_commutator_norm(&sp, &phi(&sp, &f), &phi_hat(&sp, &f)).unwrap();
    assert!(v > 1e-2, "{v}");
    assert!(commutator_norm(&sp, &phi(&sp, &f), &phi_hat(&sp, &f)).unwrap() > 1e-2);
}

fn locality_space(s: ScatteringFunction) -> FockSpace {
    FockSpace::new(RapidityGrid::new(-2.5, 2.5, 32, 1.0).unwrap(), s, 3).unwrap()
}

fn locality_functions() -> (TestFunction, TestFunction) {
    let f = TestFunction::gaussian([0.0, 0.0], [0.5, 0.5]).with_eps_tail(1e-4);
    let g = TestFunction::gaussian([0.5, 0.0], [0.5, 0.5]).with_eps_tail(1e-4);
    (f, g)
}

const SEPARATIONS: [f64; 5] = [0.0, 1.0, 2.0, 4.0, 8.0];

#[test]
fn twisted_locality_decays() {
    let (f, g) = locality_functions();
    for s in [ScatteringFunction::one(), ScatteringFunction::sinh_factor(1.0)] {
        let rep = wedge_locality_report(&locality_space(s), &f, &g, &SEPARATIONS, LocalityPair::PhiPhiHat).unwrap();
        assert!(rep.monotone_decay, "{rep:?}");
        assert!(rep.decay_ratio >= 1e3, "{rep:?}");
        assert!(rep.rows[0].anticommutator_norm > 1e-2);
    }
}

#[test]
fn majorana_commutator_decays() {
    // Equal-time packets: the half-unit time offset used for φ/φ̂ makes the ψ₋
    // commutator start small and hit the grid aliasing floor near 2e-5.
    let (f, _) = locality_functions();
    let g = TestFunction::gaussian([0.0, 0.0], [0.5, 0.5]).with_eps_tail(1e-4);
    let sp = locality_space(ScatteringFunction::minus_one());
    for c in [Sign::Plus, Sign::Minus] {
        let rep = wedge_locality_report(&sp, &f, &g, &SEPARATIONS, LocalityPair::MajoranaPhiPrime(c)).unwrap();
        assert!(rep.monotone_decay && rep.decay_ratio >= 1e3, "{rep:?}");
    }
}

#[test]
fn insufficient_separation_is_rejected() {
    let (f, g) = locality_functions();
    let sp = common::space(ScatteringFunction::one(), 4, 2);
    let err = wedge_locality_report(&sp, &f, &g, &[0.0, 1.0, 2.0], LocalityPair::PhiPhiHat);
    assert!(matches!(err, Err(Error::SupportViolation(_))));
}
