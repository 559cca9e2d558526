mod common;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;
use zfqft_core::carlattice::*;
use zfqft_core::linalg::spectral_norm;
use zfqft_core::{Error, C64, I};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn dist(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    spectral_norm(&(a - b))
}

fn random_matrix(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

/// a_j built from occupation bits: a_j|b⟩ = (−1)^{#occupied modes before j}|b − e_j⟩.
fn bit_annihilator(n: usize, j: usize) -> DMatrix<C64> {
    let d = 1 << n;
    let bit = |b: usize, k: usize| (b >> (n - 1 - k)) & 1;
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        if bit(b, j) == 1 {
            let before: usize = (0..j).map(|k| bit(b, k)).sum();
            m[(b ^ (1 << (n - 1 - j)), b)] = c(if before % 2 == 0 { 1.0 } else { -1.0 });
        }
    }
    m
}

/// Diagonal matrix with entry f(popcount of the occupied modes in `modes`).
fn bit_diagonal(n: usize, modes: &[usize], f: impl Fn(u32) -> C64) -> DMatrix<C64> {
    let d = 1usize << n;
    DMatrix::from_diagonal(&DVector::from_fn(d, |b, _| {
        f(modes.iter().map(|&k| ((b >> (n - 1 - k)) & 1) as u32).sum())
    }))
}

fn parity_oracle(n: usize, modes: &[usize]) -> DMatrix<C64> {
    bit_diagonal(n, modes, |p| c(if p % 2 == 0 { 1.0 } else { -1.0 }))
}

#[test]
fn mode_operators_match_bit_oracle() {
    for (l, r) in [(1, 1), (2, 1), (2, 2), (2, 3)] {
        let sys = CarSystem::new(l, r).unwrap();
        let n = l + r;
        for j in 0..n {
            assert_eq!(dist(sys.annihilator(j), &bit_annihilator(n, j)), 0.0);
        }
        let all: Vec<usize> = (0..n).collect();
        assert_eq!(dist(sys.gamma(), &parity_oracle(n, &all)), 0.0);
        // Z has eigenvalue 1 on even and −i on odd states.
        let z = bit_diagonal(n, &all, |p| if p % 2 == 0 { c(1.0) } else { -I });
        assert!(dist(sys.twist(), &z) < 1e-15);
        assert!(sys.car_residual() < 1e-15);
        assert!(sys.grading_residual() < 1e-15);
    }
}

#[test]
fn system_size_is_validated() {
    assert!(matches!(CarSystem::new(0, 2), Err(Error::InvalidParameter(_))));
    assert!(matches!(CarSystem::new(3, 3), Err(Error::InvalidParameter(_))));
    let sys = CarSystem::new(1, 1).unwrap();
    assert!(matches!(sys.element(DMatrix::zeros(3, 3), Side::Global), Err(Error::Shape(_))));
}

#[test]
fn regions_follow_the_documented_split() {
    let r = CarSystem::new(2, 2).unwrap().regions();
    assert_eq!((r.left, r.local, r.right), (vec![0], vec![1, 2], vec![3]));
    let r = CarSystem::new(1, 1).unwrap().regions();
    assert_eq!((r.left, r.local, r.right), (vec![0], vec![1], vec![]));
    let r = CarSystem::new(3, 1).unwrap().regions();
    assert_eq!((r.left, r.local, r.right), (vec![0, 1, 2], vec![3], vec![]));
}

#[test]
fn graded_split_examples() {
    let sys = CarSystem::new(2, 2).unwrap();
    let gamma = sys.element(sys.gamma().clone(), Side::Global).unwrap();
    assert_eq!(gamma.grade(), GradeTag::Even);
    let (p, m) = graded_split(&sys, &gamma);
    assert_eq!(dist(p.matrix(), sys.gamma()), 0.0);
    assert_eq!(m.matrix().norm(), 0.0);

    let a = sys.annihilator_element(0);
    assert_eq!((a.grade(), a.side()), (GradeTag::Odd, Side::Left));
    let (p, m) = graded_split(&sys, &a);
    assert_eq!(p.matrix().norm(), 0.0);
    assert_eq!(dist(m.matrix(), a.matrix()), 0.0);

    let mut rng = common::rng(1);
    for _ in 0..10 {
        let x = sys.element(random_matrix(sys.dim(), &mut rng), Side::Global).unwrap();
        assert_eq!(x.grade(), GradeTag::Mixed);
        let (p, m) = graded_split(&sys, &x);
        assert!(dist(&(p.matrix() + m.matrix()), x.matrix()) < 1e-15);
        assert_eq!((p.grade(), m.grade()), (GradeTag::Even, GradeTag::Odd));
        assert!(dist(&sys.alpha(p.matrix()), p.matrix()) < 1e-15);
    }
}

#[test]
fn twist_examples() {
    let sys = CarSystem::new(1, 2).unwrap();
    let n = sys.number(1) + sys.gamma();
    let even = sys.element(n.clone(), Side::Global).unwrap();
    assert!(dist(twist_conjugate(&sys, &even).matrix(), &n) < 1e-15);

    let a = sys.annihilator_element(0);
    let expected = sys.gamma() * a.matrix() * I;
    assert!(dist(twist_conjugate(&sys, &a).matrix(), &expected) < 1e-15);

    let mut rng = common::rng(2);
    for _ in 0..10 {
        let x = sys.element(random_matrix(sys.dim(), &mut rng), Side::Global).unwrap();
        let (_, odd) = graded_split(&sys, &x);
        let tt = twist_conjugate(&sys, &twist_conjugate(&sys, &odd));
        assert!(dist(tt.matrix(), &(sys.gamma() * odd.matrix() * sys.gamma())) < 1e-14);
        // Oracle: A_+ + iΓA_− from an explicitly diagonal Z.
        let (p, m) = graded_split(&sys, &x);
        let expected = p.matrix() + sys.gamma() * m.matrix() * I;
        assert!(dist(twist_conjugate(&sys, &x).matrix(), &expected) < 1e-14);
    }
}

fn odd_on(sys: &CarSystem, j: usize, rng: &mut impl Rng) -> CarElement {
    let m = sys.annihilator(j) * C64::new(rng.gen(), rng.gen()) + sys.creator(j) * C64::new(rng.gen(), rng.gen());
    sys.element(m, sys.side_of(&[j])).unwrap()
}

fn even_on(sys: &CarSystem, j: usize, rng: &mut impl Rng) -> CarElement {
    let m = sys.identity() * c(0.5) + sys.number(j) * C64::new(rng.gen(), rng.gen());
    sys.element(m, sys.side_of(&[j])).unwrap()
}

#[test]
fn graded_permute_two_elements() {
    let sys = CarSystem::new(2, 2).unwrap();
    let mut rng = common::rng(3);
    let evens = [even_on(&sys, 0, &mut rng), even_on(&sys, 3, &mut rng)];
    assert!(verify_graded_permute(&sys, &evens, &[1, 0]).unwrap() < 1e-13);
    // Odd elements on opposite sides anticommute: the identity must carry the sign.
    let odds = [odd_on(&sys, 0, &mut rng), odd_on(&sys, 3, &mut rng)];
    let (a, b) = (odds[0].matrix(), odds[1].matrix());
    assert!(dist(&(b * a), &(-(a * b))) < 1e-15);
    assert!(verify_graded_permute(&sys, &odds, &[1, 0]).unwrap() < 1e-13);
}

/// The sign of the identity with grades indexed by position rather than by
/// the labels of the exchanged elements.
fn position_indexed_residual(sys: &CarSystem, el: &[CarElement], sigma: &[usize], odd: &[bool]) -> f64 {
    let lhs = sigma.iter().fold(sys.identity(), |acc, &k| acc * el[k].matrix());
    let mut sign = 1.0;
    for j in 0..sigma.len() {
        for k in j + 1..sigma.len() {
            if sigma[j] > sigma[k] && odd[j] && odd[k] {
                sign = -sign;
            }
        }
    }
    let rhs = el.iter().fold(sys.identity(), |acc, e| acc * e.matrix()) * c(sign);
    dist(&lhs, &rhs)
}

#[test]
fn graded_permute_three_mixed_grades() {
    let sys = CarSystem::new(2, 2).unwrap();
    let mut rng = common::rng(4);
    let el = [even_on(&sys, 0, &mut rng), odd_on(&sys, 1, &mut rng), odd_on(&sys, 3, &mut rng)];
    let scale = el.iter().map(|e| spectral_norm(e.matrix())).product::<f64>();
    for sigma in zfqft_core::fockspace::tensor::permutations(3) {
        assert!(verify_graded_permute(&sys, &el, &sigma).unwrap() < 1e-12);
    }
    // For the cycle (2,3,1) only the label-indexed sign is right.
    let sigma = [1, 2, 0];
    assert!(position_indexed_residual(&sys, &el, &sigma, &[false, true, true]) > 0.1 * scale);
}

#[test]
fn graded_permute_rejects_bad_input() {
    let sys = CarSystem::new(1, 1).unwrap();
    let mut rng = common::rng(5);
    let mixed = sys.element(random_matrix(sys.dim(), &mut rng), Side::Global).unwrap();
    let a = sys.annihilator_element(1);
    assert!(matches!(verify_graded_permute(&sys, &[mixed, a.clone()], &[1, 0]), Err(Error::GradeSide(_))));
    let same_mode = [a.clone(), sys.element(sys.creator(1), Side::Right).unwrap()];
    assert!(matches!(verify_graded_permute(&sys, &same_mode, &[1, 0]), Err(Error::GradeSide(_))));
    assert!(matches!(verify_graded_permute(&sys, &[a.clone(), a], &[0, 0]), Err(Error::InvalidParameter(_))));
}

#[test]
fn left_disorder_minimal_system() {
    let sys = CarSystem::new(1, 1).unwrap();
    let vl = disorder_left(&sys);
    let expected = DMatrix::<C64>::identity(4, 4) - sys.number(0) * c(2.0);
    assert_eq!(dist(vl.matrix(), &expected), 0.0);
    assert_eq!(dist(vl.matrix(), &parity_oracle(2, &[0])), 0.0);
    let v = vl.matrix();
    let a0 = sys.annihilator(0);
    let b = sys.annihilator(1) + sys.number(1);
    assert!(dist(&(v * a0 * v.adjoint()), &(-a0)) < 1e-15);
    assert!(dist(&(v * &b * v.adjoint()), &b) < 1e-15);
    assert!(dist(&(v * v), &sys.identity()) < 1e-15);
    assert!(zfqft_core::carlattice::disorder::left_disorder_residual(&sys, v) < 1e-13);
}

#[test]
fn gamma_times_left_disorder_is_right_disorder() {
    for n in [1, 2] {
        let sys = CarSystem::new(n, n).unwrap();
        let gv = sys.gamma() * disorder_left(&sys).matrix();
        assert!(zfqft_core::carlattice::disorder::right_disorder_residual(&sys, &gv) < 1e-13);
        assert!(dist(&gv, &parity_oracle(2 * n, &sys.right_modes())) < 1e-15);
        for j in sys.left_modes() {
            let a = sys.annihilator(j);
            assert!(dist(&(&gv * a * gv.adjoint()), a) < 1e-15);
        }
        for j in sys.right_modes() {
            let a = sys.annihilator(j);
            assert!(dist(&(&gv * a * gv.adjoint()), &(-a)) < 1e-15);
        }
    }
}

#[test]
fn conditional_expectation_examples() {
    let sys = CarSystem::new(2, 2).unwrap();
    let ee = sys.number(0) * (sys.identity() - sys.number(3));
    let m = conditional_expectation(&sys, &sys.element(ee.clone(), Side::Global).unwrap());
    assert!(dist(m.matrix(), &ee) < 1e-15);
    let oo = sys.annihilator(0) * sys.annihilator(3);
    // Oracle: Ad V_L and Ad V_R each flip one factor, so the four terms cancel in pairs.
    let m = conditional_expectation(&sys, &sys.element(oo, Side::Global).unwrap());
    assert!(m.matrix().norm() < 1e-15);

    let mut rng = common::rng(6);
    let vl = disorder_left(&sys).into_matrix();
    let vr = disorder_right(&sys).into_matrix();
    for _ in 0..20 {
        let a = sys.element(random_matrix(sys.dim(), &mut rng), Side::Global).unwrap();
        let ma = conditional_expectation(&sys, &a);
        let mma = conditional_expectation(&sys, &ma);
        assert!(dist(mma.matrix(), ma.matrix()) < 1e-13);
        assert!(dist(&(ma.matrix() * &vl), &(&vl * ma.matrix())) < 1e-13);
        assert!(dist(&(ma.matrix() * &vr), &(&vr * ma.matrix())) < 1e-13);
    }
}

#[test]
fn beta_examples_and_laws() {
    for n in [1, 2] {
        let sys = CarSystem::new(n, n).unwrap();
        let local = sys.regions().local;
        let v = disorder_left(&sys);
        let vm = v.matrix().clone();
        let mut rng = common::rng(7);
        let f = sys.random_in(&local, &mut rng);
        let bf = beta_automorphism(&sys, &sys.element(f.clone(), Side::Global).unwrap(), &v).unwrap();
        assert!(dist(bf.matrix(), &f) < 1e-12);
        let bv = beta_automorphism(&sys, &v, &v).unwrap();
        assert!(dist(bv.matrix(), &(-&vm)) < 1e-12);
        let beta = |x: &DMatrix<C64>| {
            beta_automorphism(&sys, &sys.element(x.clone(), Side::Global).unwrap(), &v).unwrap().into_matrix()
        };
        for _ in 0..20 {
            let a = sys.random_in(&local, &mut rng) + sys.random_in(&local, &mut rng) * &vm;
            let b = sys.random_in(&local, &mut rng) + sys.random_in(&local, &mut rng) * &vm;
            assert!(dist(&beta(&(&a * &b)), &(beta(&a) * beta(&b))) < 1e-12);
            assert!(dist(&beta(&beta(&a)), &a) < 1e-12);
        }
    }
}

#[test]
fn beta_errors() {
    let sys = CarSystem::new(1, 1).unwrap();
    let v = disorder_left(&sys);
    let outside = sys.annihilator_element(0);
    assert!(matches!(beta_automorphism(&sys, &outside, &v), Err(Error::Decomposition(_))));
    let not_disorder = sys.element(sys.identity(), Side::Global).unwrap();
    assert!(matches!(beta_automorphism(&sys, &v, &not_disorder), Err(Error::Precondition(_))));
}

#[test]
fn fixed_point_nets_minimal_and_split_systems() {
    for (l, r, field_dim) in [(1, 1, 4), (2, 2, 16), (1, 2, 16), (2, 1, 4)] {
        let sys = CarSystem::new(l, r).unwrap();
        let report = fixed_point_nets(&sys).unwrap();
        assert_eq!(report.field_dim, field_dim, "({l},{r})");
        assert_eq!(report.extended_dim, 2 * field_dim);
        for id in &report.identities {
            assert!(id.holds, "({l},{r}) {}: {id:?}", id.name);
            assert!(id.residual < 1e-12);
        }
        assert!(report.pass);
        assert_eq!(report.identities.len(), 6);
    }
}

#[test]
fn sin_approximant_examples() {
    let zero = DMatrix::<C64>::zeros(3, 3);
    assert_eq!(sin_approximant(&zero, 0.5).unwrap().norm(), 0.0);

    let t = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(10.0)]));
    let cm = sin_approximant(&t, 0.1).unwrap();
    let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(10.0 * 1f64.sin())]));
    assert!(dist(&cm, &expected) < 1e-13);
    let e2 = DVector::from_vec(vec![c(0.0), c(1.0)]);
    let lhs = ((&t - &cm) * &e2).norm();
    assert!((lhs - (10.0 - 10.0 * 1f64.sin())).abs() < 1e-13);
    assert!((lhs - 1.585).abs() < 1e-3);
    assert!(lhs <= 0.1 * (t.adjoint() * &t * &e2).norm());
    assert!(matches!(sin_approximant(&t, 0.0), Err(Error::InvalidParameter(_))));
}

/// C_ε = T h(T*T) with h(λ) = sin(ε√λ)/(ε√λ), from a Hermitian eigendecomposition.
fn sin_oracle(t: &DMatrix<C64>, eps: f64) -> DMatrix<C64> {
    let gram = t.adjoint() * t;
    let eig = SymmetricEigen::new((&gram + gram.adjoint()) * c(0.5));
    let h = DVector::from_fn(eig.eigenvalues.len(), |i, _| {
        let s = eig.eigenvalues[i].max(0.0).sqrt();
        c(if eps * s < 1e-8 { 1.0 } else { (eps * s).sin() / (eps * s) })
    });
    let u = &eig.eigenvectors;
    t * u * DMatrix::from_diagonal(&h) * u.adjoint()
}

#[test]
fn sin_approximant_matches_spectral_oracle_and_bounds() {
    let mut rng = common::rng(8);
    for _ in 0..20 {
        let t = random_matrix(8, &mut rng) * c(4.0);
        let basis: Vec<DVector<C64>> = (0..8)
            .map(|k| {
                let mut e = DVector::zeros(8);
                e[k] = c(1.0);
                e
            })
            .collect();
        for eps in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
            let cm = sin_approximant(&t, eps).unwrap();
            assert!(dist(&cm, &sin_oracle(&t, eps)) < 1e-10 * spectral_norm(&t).max(1.0));
            let b = sin_bounds(&t, eps, &basis).unwrap();
            assert!(b.holds, "{b:?}");
            assert!(b.norm_ratio <= 1.0 + 1e-12 && b.margin <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn car_report_passes_and_is_reproducible() {
    let sys = CarSystem::new(2, 2).unwrap();
    let a = car_report(&sys, 11).unwrap();
    let b = car_report(&sys, 11).unwrap();
    let failing: Vec<_> = a.checks.iter().filter(|c| !c.pass).collect();
    assert!(a.pass, "{failing:?}");
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graded_permute_random_grades(seed in 0u64..1000, grades in proptest::collection::vec(any::<bool>(), 4), perm_index in 0usize..24) {
        let sys = CarSystem::new(2, 2).unwrap();
        let mut rng = common::rng(seed);
        let el: Vec<CarElement> = grades
            .iter()
            .enumerate()
            .map(|(j, &odd)| if odd { odd_on(&sys, j, &mut rng) } else { even_on(&sys, j, &mut rng) })
            .collect();
        let sigma = &zfqft_core::fockspace::tensor::permutations(4)[perm_index];
        // Oracle: move the factors back to label order, counting odd transpositions.
        let mut sign = 1.0;
        for j in 0..4 {
            for k in j + 1..4 {
                if sigma[j] > sigma[k] && grades[sigma[j]] && grades[sigma[k]] {
                    sign = -sign;
                }
            }
        }
        let lhs = sigma.iter().fold(sys.identity(), |acc, &k| acc * el[k].matrix());
        let ordered = el.iter().fold(sys.identity(), |acc, e| acc * e.matrix()) * c(sign);
        prop_assert!(dist(&lhs, &ordered) < 1e-13);
        prop_assert!(verify_graded_permute(&sys, &el, sigma).unwrap() < 1e-12);
    }

    #[test]
    fn sin_bounds_hold_for_random_matrices(seed in 0u64..10_000, scale in 0.1f64..20.0, eps in 1e-3f64..5.0) {
        let mut rng = common::rng(seed);
        let t = random_matrix(6, &mut rng) * c(scale);
        let vectors: Vec<DVector<C64>> =
            (0..6).map(|_| DVector::from_fn(6, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))).collect();
        let b = sin_bounds(&t, eps, &vectors).unwrap();
        prop_assert!(b.holds, "{:?}", b);
    }
}
