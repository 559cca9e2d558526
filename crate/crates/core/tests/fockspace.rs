mod common;

use std::sync::Arc;

use common::*;
use zfqft_core::fockspace::{verify_zf_relations, FockBasis, FockOperator, FockState, Grade};
use zfqft_core::smatrix::ScatteringFunction;
use zfqft_core::{C64, I};

#[test]
fn symmetrize_with_s_one_is_plain_symmetrization() {
    let sp = space(ScatteringFunction::one(), 4, 3);
    let mut r = rng(1);
    let t = random_vector(&mut r, 64);
    let p = sp.s_symmetrize(3, &t).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let perms = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
                let avg: C64 = perms.iter().map(|q| t[q[0] * 16 + q[1] * 4 + q[2]]).sum::<C64>() / 6.0;
                assert!((p[a * 16 + b * 4 + c] - avg).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn symmetrize_with_s_minus_one_antisymmetrizes() {
    let sp = space(ScatteringFunction::minus_one(), 5, 2);
    let mut r = rng(2);
    let t = random_vector(&mut r, 25);
    let p = sp.s_symmetrize(2, &t).unwrap();
    for a in 0..5 {
        assert_eq!(p[a * 5 + a], C64::new(0.0, 0.0));
        for b in 0..5 {
            let expect = (t[a * 5 + b] - t[b * 5 + a]) / 2.0;
            assert!((p[a * 5 + b] - expect).norm() < 1e-15);
        }
    }
}

#[test]
fn symmetrizer_is_an_orthogonal_projection() {
    for s in all_s() {
        let sp = space(s, 5, 3);
        let mut r = rng(3);
        for rank in 2..=3 {
            let a = random_vector(&mut r, 5usize.pow(rank as u32));
            let b = random_vector(&mut r, 5usize.pow(rank as u32));
            let pa = sp.s_symmetrize(rank, &a).unwrap();
            let ppa = sp.s_symmetrize(rank, &pa).unwrap();
            assert!(max_diff(&pa, &ppa) < 1e-12);
            let pb = sp.s_symmetrize(rank, &b).unwrap();
            let lhs: C64 = pa.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            let rhs: C64 = a.iter().zip(&pb).map(|(x, y)| x.conj() * y).sum();
            assert!((lhs - rhs).norm() < 1e-12);
            // Symmetric tensors are fixed by every adjacent S-transposition.
            for j in 0..rank - 1 {
                let tj = sp.s_transposition(rank, &pa, j).unwrap();
                assert!(max_diff(&tj, &pa) < 1e-12);
            }
        }
    }
}

#[test]
fn creation_on_vacuum_and_pauli_exclusion() {
    let sp = space(ScatteringFunction::minus_one(), 6, 3);
    let mut r = rng(4);
    let psi = random_vector(&mut r, 6);
    let one = sp.zf_create(&psi, &sp.vacuum()).unwrap();
    assert_eq!(one.sector(1), &psi[..]);
    let two = sp.zf_create(&psi, &one).unwrap();
    assert!(two.norm() < 1e-14);
}

#[test]
fn two_particle_norm_matches_double_sum_oracle() {
    let sp = space(ScatteringFunction::sinh_factor(0.9), 10, 3);
    let g = sp.grid().clone();
    let dt = g.spacing();
    let gauss = |c: f64, k: f64| -> Vec<C64> {
        g.nodes().iter().map(|t| C64::from_polar((-(t - c).powi(2) / 0.5).exp(), k * t)).collect()
    };
    let (p1, p2) = (gauss(-0.4, 1.0), gauss(0.6, -0.5));
    let st = sp.zf_create(&p1, &sp.zf_create(&p2, &sp.vacuum()).unwrap()).unwrap();
    let mut oracle = C64::new(0.0, 0.0);
    for a in 0..10 {
        for b in 0..10 {
            let s = sp.s().eval_real(g.node(b) - g.node(a));
            let x = p1[a] * p2[b];
            oracle += x.conj() * (x + s * p1[b] * p2[a]) * dt * dt;
        }
    }
    assert!((st.inner(&st) - oracle).norm() < 1e-12, "{} vs {}", st.inner(&st), oracle);
}

#[test]
fn annihilation_basics() {
    let sp = space(ScatteringFunction::sinh_factor(0.5), 7, 3);
    let mut r = rng(5);
    let psi = random_vector(&mut r, 7);
    assert_eq!(sp.zf_annihilate(&psi, &sp.vacuum()).unwrap().norm(), 0.0);
    for t in 0..7 {
        let one = sp.create_at(t, &sp.vacuum()).unwrap();
        for e in 0..7 {
            let v = sp.annihilate_at(e, &one).unwrap();
            let expect = if e == t { 1.0 / sp.dtheta() } else { 0.0 };
            assert!((v.sector(0)[0] - expect).norm() < 1e-12);
            assert!(v.truncated_to(0).norm() - v.norm() == 0.0);
        }
    }
}

#[test]
fn creation_and_annihilation_are_adjoint() {
    for s in all_s() {
        let sp = space(s, 6, 3);
        let mut r = rng(6);
        for _ in 0..20 {
            let psi = random_vector(&mut r, 6);
            let phi = random_state(&sp, &mut r);
            let chi = random_state(&sp, &mut r);
            let lhs = sp.zf_create(&psi, &phi.truncated_to(2)).unwrap().inner(&chi);
            let conj: Vec<C64> = psi.iter().map(|x| x.conj()).collect();
            let rhs = phi.truncated_to(2).inner(&sp.zf_annihilate(&conj, &chi).unwrap());
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}

#[test]
fn zf_relations_hold_for_all_builtins() {
    for s in all_s() {
        let sp = space(s, 8, 3);
        let rep = verify_zf_relations(&sp, 8, 11, 1e-10).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn zf_relations_fail_for_a_mismatched_symmetrizer() {
    // Operators built with S = 1 do not satisfy the S_b exchange relation.
    let sp = space(ScatteringFunction::one(), 6, 3);
    let sb = space(ScatteringFunction::sinh_factor(1.0), 6, 3);
    let basis = FockBasis::up_to(&sp, 2).unwrap();
    let (t, tp) = (1, 4);
    let res = |phi: &FockState| {
        let a = sp.create_at(t, &sp.create_at(tp, phi).unwrap()).unwrap();
        let b = sp.create_at(tp, &sp.create_at(t, phi).unwrap()).unwrap();
        &a - &(&b * sb.s_nodes(t, tp))
    };
    assert!(zfqft_core::fockspace::map_norm(&basis, 2, &res) > 0.1);
}

#[test]
fn basis_is_orthonormal_with_expected_dimensions() {
    let sp = space(ScatteringFunction::one(), 5, 3);
    let b = FockBasis::new(&sp);
    assert_eq!(b.dim(), 1 + 5 + 15 + 35);
    let sm = space(ScatteringFunction::sinh_factor(0.3), 5, 3);
    let bm = FockBasis::new(&sm);
    assert_eq!(bm.dim(), 1 + 5 + 10 + 10);
    for i in 0..bm.dim() {
        for j in 0..bm.dim() {
            let ip = bm.state(i).inner(&bm.state(j));
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((ip - expect).norm() < 1e-13);
        }
    }
    let mut r = rng(7);
    let st = random_state(&sm, &mut r);
    assert!(bm.state_from_coords(&bm.coords(&st)).max_abs_diff(&st) < 1e-12);
}

#[test]
fn grading_twist_and_translations() {
    let sp = space(ScatteringFunction::sinh_factor(0.7), 5, 3);
    let b = Arc::new(FockBasis::new(&sp));
    let gamma = FockOperator::grading(b.clone());
    let one = FockOperator::identity(b.clone());
    assert_eq!(gamma.compose(&gamma).sub(&one).max_abs(), 0.0);
    assert_eq!(sp.apply_grading(&sp.vacuum()), sp.vacuum());
    let mut r = rng(8);
    let psi = random_vector(&mut r, 5);
    let zdag = FockOperator::from_linear_map(b.clone(), &|s: &FockState| sp.zf_create(&psi, s).unwrap());
    assert_eq!(zdag.grade(), Grade::Odd);
    assert!(gamma.compose(&zdag).compose(&gamma).add(&zdag).max_abs() == 0.0);

    let z = FockOperator::twist(b.clone());
    assert_eq!(sp.apply_twist(&sp.vacuum()), sp.vacuum());
    let one_p = sp.one_particle(&psi).unwrap();
    assert!(sp.apply_twist(&one_p).max_abs_diff(&(&one_p * (-I))) == 0.0);
    assert!(z.adjoint().compose(&z).sub(&one).norm() < 1e-14);
    // Z A Z* = A₊ + iΓA₋ on the odd generator z†(ψ).
    let tw = z.compose(&zdag).compose(&z.adjoint());
    assert!(tw.sub(&gamma.compose(&zdag).scale(I)).norm() < 1e-13);

    let u0 = FockOperator::translate(b.clone(), [0.0, 0.0]);
    assert_eq!(u0.sub(&one).max_abs(), 0.0);
    let (x, y) = ([0.3, -1.2], [2.1, 0.4]);
    let ux = FockOperator::translate(b.clone(), x);
    let uy = FockOperator::translate(b.clone(), y);
    let uxy = FockOperator::translate(b.clone(), [x[0] + y[0], x[1] + y[1]]);
    assert!(ux.compose(&uy).sub(&uxy).norm() < 1e-13);
    assert!(gamma.commutator(&ux).norm() == 0.0);
    assert!(sp.apply_translation(x, &sp.vacuum()).max_abs_diff(&sp.vacuum()) == 0.0);
    // Matrix-free and dense translations agree.
    let st = random_state(&sp, &mut r);
    assert!(ux.apply(&st).max_abs_diff(&sp.apply_translation(x, &st)) < 1e-12);
}

#[test]
fn reflection_properties() {
    let sp = space(ScatteringFunction::sinh_factor(1.1), 5, 3);
    let b = Arc::new(FockBasis::new(&sp));
    let mut r = rng(9);
    assert_eq!(sp.apply_reflection(&sp.vacuum()), sp.vacuum());
    let psi = random_vector(&mut r, 5);
    let one_p = sp.one_particle(&psi).unwrap();
    let conj: Vec<C64> = psi.iter().map(|x| x.conj()).collect();
    assert_eq!(sp.apply_reflection(&one_p).sector(1), &conj[..]);

    let p2 = random_vector(&mut r, 5);
    let c2: Vec<C64> = p2.iter().map(|x| x.conj()).collect();
    let lhs = sp.apply_reflection(&sp.zf_create(&psi, &sp.zf_create(&p2, &sp.vacuum()).unwrap()).unwrap());
    let rhs = sp.zf_create(&c2, &sp.zf_create(&conj, &sp.vacuum()).unwrap()).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-10);

    // J maps S-symmetric states to S-symmetric states, J² = 1, U(j)² = 1.
    let st = random_state(&sp, &mut r);
    let js = sp.apply_reflection(&st);
    assert!(sp.symmetry_residual(&js) < 1e-12);
    assert!(sp.apply_reflection(&js).max_abs_diff(&st) == 0.0);
    assert!(sp.apply_uj(&sp.apply_uj(&st)).max_abs_diff(&st) < 1e-15);
    // Antiunitarity: ⟨JΦ, JΨ⟩ = conj⟨Φ, Ψ⟩.
    let st2 = random_state(&sp, &mut r);
    let a = sp.apply_reflection(&st).inner(&sp.apply_reflection(&st2));
    assert!((a - st.inner(&st2).conj()).norm() < 1e-12);

    // J U(x) J = U(−x).
    let x = [0.7, -0.3];
    let ux = FockOperator::translate(b.clone(), x);
    let jux = FockOperator::from_linear_map(b.clone(), &sp.reflect_conjugate(&ux));
    assert!(jux.sub(&FockOperator::translate(b.clone(), [-x[0], -x[1]])).norm() < 1e-12);
}

#[test]
fn hamiltonian_spectrum() {
    let sp = space(ScatteringFunction::one(), 5, 2);
    let b = Arc::new(FockBasis::new(&sp));
    let h = FockOperator::hamiltonian(b.clone());
    assert_eq!(h.matrix()[(0, 0)], C64::new(0.0, 0.0));
    // Grid [-2, 2] with 5 nodes contains θ = 0 at node 2.
    let idx = b.index_of(&[2]).unwrap();
    assert!((h.matrix()[(idx, idx)].re - 1.0).abs() < 1e-15);
    let min_one = b.sector_range(1).map(|i| h.matrix()[(i, i)].re).fold(f64::INFINITY, f64::min);
    let scan = sp.grid().nodes().iter().map(|t| t.cosh()).fold(f64::INFINITY, f64::min);
    assert_eq!(min_one, scan);
    let mut r = rng(10);
    let st = random_state(&sp, &mut r);
    assert!(h.apply(&st).max_abs_diff(&sp.apply_hamiltonian(&st)) < 1e-12);
}

#[test]
fn binary_dump_round_trip_and_layout() {
    let sp = space(ScatteringFunction::sinh_factor(0.5), 5, 2);
    let mut rng = common::rng(21);
    let st = common::random_state(&sp, &mut rng);
    let bytes = st.to_zfqf_bytes().unwrap();
    assert_eq!(&bytes[..4], b"ZFQF");
    assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
    assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 5);
    assert_eq!(u16::from_le_bytes([bytes[8], bytes[9]]), 2);
    assert!(bytes[10..16].iter().all(|&b| b == 0));
    assert_eq!(bytes.len(), 16 + 16 * (1 + 5 + 25));
    // The first complex number after the header is the vacuum amplitude.
    let re = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    assert_eq!(re, st.sector(0)[0].re);
    let back = FockState::from_zfqf_bytes(&bytes, sp.dtheta()).unwrap();
    assert_eq!(back, st);
    assert!(FockState::from_zfqf_bytes(&bytes[..40], sp.dtheta()).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(FockState::from_zfqf_bytes(&bad, sp.dtheta()).is_err());
}
