mod common;

use cliffspec::analysis::MultiIndex;
use cliffspec::calculus::*;
use cliffspec::clifford::Multivector;
use cliffspec::linalg::RMat;
use cliffspec::moebius::{from_uw, MoebElement, Point};
use common::*;
use rand::Rng;

const COND: f64 = DEFAULT_COND_MAX;

#[test]
fn resolvent_cocycle() {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 2;
        let d = 2 + r.gen_range(0..5);
        let a = embed(&tuple(&mut r, n, d, 0.4));
        let g1 = moeb(&mut r, n, 0.8);
        let g2 = moeb(&mut r, n, 0.8);
        let moved = moebius_on_operator(&g1, &a, COND).unwrap();
        let lhs = resolvent(&g1, &a, COND).unwrap().mul(&resolvent(&g2, &moved, COND).unwrap());
        let rhs = resolvent(&g1.compose(&g2).unwrap(), &a, COND).unwrap();
        worst = worst.max(lhs.dist(&rhs));
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn difference_identity() {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 100 {
        let n = 2 + draws % 2;
        let d = 2 + r.gen_range(0..5);
        let a = embed(&tuple(&mut r, n, d, 0.4));
        let g = moeb(&mut r, n, 0.8);
        let x = vector(&mut r, n, 1.5);
        if !resolvent_membership(&x, &a, 1e8).unwrap() {
            continue;
        }
        worst = worst.max(lemma318_residual(&g, &a, &x, COND).unwrap());
        draws += 1;
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn difference_identity_at_identity_is_exact() {
    let mut r = rng(13);
    let a = embed(&tuple(&mut r, 2, 3, 0.4));
    let res = lemma318_residual(&MoebElement::identity(2), &a, &[0.9, -0.7], COND).unwrap();
    assert!(res < 1e-15);
}

#[test]
fn resolvent_set_is_carried_along() {
    let mut r = rng(14);
    for _ in 0..20 {
        let a = embed(&tuple(&mut r, 2, 3, 0.4));
        let g = moeb(&mut r, 2, 0.7);
        let moved = moebius_on_operator(&g, &a, COND).unwrap();
        for _ in 0..10 {
            let x = vector(&mut r, 2, 1.0);
            if !resolvent_membership(&x, &a, 1e8).unwrap() {
                continue;
            }
            let gx = match g.inverse().apply(&Point::finite(&x)).unwrap() {
                Point::Finite(v) => v,
                Point::Infinity => continue,
            };
            assert!(resolvent_membership(&gx, &moved, 1e10).unwrap());
        }
    }
}

#[test]
fn action_is_a_left_action() {
    let mut r = rng(15);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 2 + i % 2;
        let a = embed(&tuple(&mut r, n, 3, 0.4));
        let g1 = moeb(&mut r, n, 0.7);
        let g2 = moeb(&mut r, n, 0.7);
        // g . A is moebius_on_operator(g^{-1}, A)
        let act = |g: &MoebElement, a: &CliffOperator| moebius_on_operator(&g.inverse(), a, COND).unwrap();
        let lhs = act(&g1.compose(&g2).unwrap(), &a);
        let rhs = act(&g1, &act(&g2, &a));
        worst = worst.max(lhs.dist(&rhs));
        let back = moebius_on_operator(&g1.inverse(), &moebius_on_operator(&g1, &a, COND).unwrap(), COND).unwrap();
        worst = worst.max(back.dist(&a));
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn resolvent_matches_scalar_resolvents_on_diagonal_pair() {
    let mut r = rng(16);
    let t = diagonal_tuple(&mut r, 2, 4, 0.5);
    let g = moeb(&mut r, 2, 0.7);
    let res = resolvent(&g, &embed(&t), COND).unwrap();
    let m = from_uw(&g);
    for i in 0..4 {
        let x = Multivector::from_vector(&[t.mats()[0][(i, i)], t.mats()[1][(i, i)]]);
        let s = (&m.a.reversion() - &(&m.c.reversion() * &x)).inverse().unwrap();
        for mask in 0..4 {
            assert!((res.blade(mask)[(i, i)] - s.get(mask)).abs() < 1e-12);
        }
    }
}

#[test]
fn nilpotent_image_of_translated_jordan_block() {
    // A1 + i A2 = u + J_2(0) after the unitary (I + iK)/sqrt 2
    let u = [0.3, -0.2];
    let a1 = RMat::from_rows(&[vec![u[0], 0.5], vec![0.5, u[0]]]);
    let a2 = RMat::from_rows(&[vec![u[1] - 0.5, 0.0], vec![0.0, u[1] + 0.5]]);
    let t = OperatorTuple::new(vec![a1, a2]).unwrap();
    // g^{-1} is the translation taking u to 0
    let g = MoebElement::translation(u.to_vec()).unwrap().inverse();
    assert!(!resolvent_membership(&u, &embed(&t), 1e8).unwrap());
    let moved = moebius_on_operator(&g, &embed(&t), COND).unwrap();
    // the moved tuple has joint eigenvalue 0: it is no longer invertible
    assert!(op_inverse(&moved, 1e8).is_err());
    assert!(moved.is_vector_valued(1e-12));
}

#[test]
fn power_identity() {
    let mut r = rng(17);
    for k in 1..=5 {
        let n = 2 + k % 2;
        let t = tuple(&mut r, n, 3, 0.7);
        let lhs = embed(&t).pow(k as u32);
        let mut rhs = CliffOperator::zero(n, 3);
        for m in MultiIndex::of_degree(n, k) {
            rhs = rhs.add(&symmetric_product(&t, &m).unwrap().scale(m.multinomial()));
        }
        assert!(lhs.dist(&rhs) < 1e-10, "k = {k}: {}", lhs.dist(&rhs));
    }
}

#[test]
fn distinct_generators_anticommute_in_products() {
    let i = RMat::identity(2);
    let t = OperatorTuple::new(vec![i.clone(), i]).unwrap();
    let p = symmetric_product(&t, &MultiIndex(vec![1, 1])).unwrap();
    assert!(p.max_abs() < 1e-15);
    assert!(symmetric_product(&t, &MultiIndex(vec![5, 4])).is_err());
}

#[test]
fn taylor_calculus_is_linear() {
    let mut r = rng(18);
    let t = tuple(&mut r, 2, 3, 0.4);
    let c1: Vec<(MultiIndex, Multivector)> =
        MultiIndex::of_degree(2, 2).into_iter().map(|m| (m, multivector(&mut r, 2))).collect();
    let c2: Vec<(MultiIndex, Multivector)> = c1.iter().map(|(m, _)| (m.clone(), multivector(&mut r, 2))).collect();
    let sum: Vec<(MultiIndex, Multivector)> =
        c1.iter().zip(&c2).map(|((m, a), (_, b))| (m.clone(), a + &b.scale(2.0))).collect();
    let v = vector(&mut r, 3, 1.0);
    let f = |c: &[(MultiIndex, Multivector)], v: &[f64]| taylor_calculus(&t, v, c, ProductFamily::Symmetric).unwrap();
    let lhs = f(&sum, &v);
    let rhs = f(&c1, &v).add(&f(&c2, &v).scale(2.0));
    assert!(lhs.dist(&rhs) < 1e-13);
    let w = vector(&mut r, 3, 1.0);
    let vw: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - 3.0 * b).collect();
    let lhs = f(&c1, &vw);
    let rhs = f(&c1, &v).sub(&f(&c1, &w).scale(3.0));
    assert!(lhs.dist(&rhs) < 1e-13);
}

#[test]
fn vacuum_coefficient_gives_the_vector() {
    let mut r = rng(19);
    let t = tuple(&mut r, 3, 4, 0.4);
    let v = vector(&mut r, 4, 1.0);
    for fam in [ProductFamily::Symmetric, ProductFamily::Monogenic] {
        let out = taylor_calculus(&t, &v, &[(MultiIndex::zero(3), Multivector::one(3))], fam).unwrap();
        assert!(out.dist(&CliffVector::from_real(3, &v)) < 1e-15);
    }
}

#[test]
fn spectral_radius_of_single_diagonal_operator() {
    let t = OperatorTuple::new(vec![RMat::diag(&[0.5, -0.8, 0.2])]).unwrap();
    let s = spectral_radii(&t, &[0.0, 1.0, 0.0], 8, ProductFamily::Symmetric).unwrap();
    assert!((s.r_s - 0.8).abs() < 1e-12);
    assert!((s.r_l - 0.8).abs() < 1e-12);
    let s = spectral_radii(&t, &[1.0, 0.0, 1.0], 8, ProductFamily::Symmetric).unwrap();
    assert!(s.r_l < 0.8 && s.r_l > 0.5);
    assert!(s.bound_holds);
    let z = OperatorTuple::new(vec![RMat::zeros(3, 3), RMat::zeros(3, 3)]).unwrap();
    let s = spectral_radii(&z, &[1.0, 0.0, 0.0], 4, ProductFamily::Symmetric).unwrap();
    assert_eq!((s.r_s, s.r_l), (0.0, 0.0));
}

#[test]
fn modulus_without_translation_is_constant() {
    let mut r = rng(20);
    let t = diagonal_tuple(&mut r, 2, 3, 0.5);
    let g = MoebElement::rotation(pin(&mut r, 2, 2)).unwrap();
    let p = modulus_power(&g, &t, -2, 1e-10).unwrap();
    assert!(p.dist(&CliffOperator::identity(2, 3)) < 1e-14);
}
