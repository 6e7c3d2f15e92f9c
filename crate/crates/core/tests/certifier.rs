mod common;

use common::{endo, f1, f2, idx, remark2, remark3, remark4, six_point};
use noniterate::certifier::{certify_finite, certify_finite_with, certify_profiled, AbstainReason, Criterion};
use noniterate::root_solver::{find_root, RootQuery, RootStatus};
use noniterate::{Cardinal, Case, Endofunction, FiberProfile};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn six_point_map_is_c1() {
    let f = six_point();
    let c = certify_finite(&f.map);
    let c = c.certificate().expect("certificate");
    assert_eq!(c.case, Case::C1);
    assert_eq!(f.label(c.x0), "x0");
    assert_eq!(c.evidence.max_other_fiber, Cardinal::Finite(1));
    assert_eq!(c.evidence.fiber2, Cardinal::Finite(3));
    assert!(c.is_consistent());
}

#[test]
fn constant_map_abstains_on_fixed_point() {
    let (f, _) = remark2();
    let a = certify_finite(&f.map);
    assert_eq!(a.abstention().unwrap().reason, AbstainReason::FixedPointObstruction);
}

#[test]
fn large_other_fiber_abstains() {
    let (f, _) = remark3();
    let a = certify_finite(&f.map);
    let a = a.abstention().expect("abstains");
    assert_eq!(a.reason, AbstainReason::FibersTooLarge);
    let p = a.closest.as_ref().unwrap();
    assert_eq!(p.point, idx(&f, "x_0"));
    assert_eq!((p.fiber2, p.max_other_fiber), (Cardinal::Finite(9), Cardinal::Finite(9)));
}

#[test]
fn truncated_ray_map_fails_strictly() {
    let (f, _) = remark4();
    let m = f.materialize(2).unwrap();
    let a = certify_finite(&m.map.map);
    let a = a.abstention().expect("abstains");
    assert_eq!(a.reason, AbstainReason::StrictInequalityFails);
    assert!(a.boundary);
    let p = a.closest.as_ref().unwrap();
    assert_eq!(m.map.label(p.point), "x_0");
    assert_eq!((p.fiber2, p.max_other_fiber), (Cardinal::Finite(8), Cardinal::Finite(2)));
}

#[test]
fn profiled_examples() {
    for (f, x0) in [(f1(), common::q(3, 4)), (f2(), common::q(1, 4))] {
        let p = f.fiber_profile(&x0).unwrap();
        assert_eq!(p.fiber2, Cardinal::Continuum);
        assert_eq!(p.max_other_fiber, Cardinal::Finite(3));
        assert!(p.not_fixed);
        let c = certify_profiled([p]).unwrap();
        assert_eq!(c.certificate().unwrap().case, Case::C3);
    }
    let fixed = FiberProfile {
        point: 0,
        fiber1: Cardinal::Continuum,
        fiber2: Cardinal::Continuum,
        max_other_fiber: Cardinal::Finite(0),
        not_fixed: false,
    };
    assert!(certify_profiled([fixed]).unwrap().certificate().is_none());
}

#[test]
fn cardinal_order_and_arithmetic() {
    let chain = [Cardinal::Finite(0), Cardinal::Finite(1), Cardinal::Finite(7), Cardinal::Aleph0, Cardinal::Continuum];
    for (i, a) in chain.iter().enumerate() {
        for (j, b) in chain.iter().enumerate() {
            assert_eq!(a.cmp(b), i.cmp(&j));
        }
    }
    assert_eq!(Cardinal::Finite(3).checked_mul(Cardinal::Finite(4)), Some(Cardinal::Finite(12)));
    assert_eq!(Cardinal::Finite(3).checked_mul(Cardinal::Aleph0), Some(Cardinal::Aleph0));
    assert_eq!(Cardinal::union_bound(Cardinal::Aleph0, Cardinal::Continuum), Cardinal::Continuum);
    assert_eq!(Cardinal::Finite(2).cube(), Some(Cardinal::Finite(8)));
}

fn random_table(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<usize> {
    let n = rng.gen_range(1..=max_n);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn no_root(f: &Endofunction, order: u32) -> bool {
    find_root(&RootQuery::new(f.clone(), order)).unwrap().status == RootStatus::None
}

/// Counts certificates contradicted by the exhaustive solver.
fn violations(criterion: Criterion, seed: u64, maps: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut certified, mut bad) = (0, 0);
    for _ in 0..maps {
        let f = endo(&random_table(&mut rng, 7));
        if certify_finite_with(&f, criterion).certificate().is_some() {
            certified += 1;
            if !(no_root(&f, 2) && no_root(&f, 3)) {
                bad += 1;
            }
        }
    }
    (certified, bad)
}

#[test]
fn soundness_fuzz() {
    let (certified, bad) = violations(Criterion::SecondPreimage, 0x5eed, 10_000);
    assert!(certified > 100, "only {certified} certificates");
    assert_eq!(bad, 0);
}

#[test]
fn first_preimage_criterion_is_unsound() {
    let (_, bad) = violations(Criterion::FirstPreimageOnly, 0x5eed, 10_000);
    assert!(bad >= 1);
}

#[test]
fn one_certificate_covers_orders_two_to_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seen = 0;
    while seen < 40 {
        let f = endo(&random_table(&mut rng, 7));
        if certify_finite(&f).certificate().is_some() {
            seen += 1;
            for order in 2..=4 {
                assert!(no_root(&f, order), "{:?} order {order}", f.table());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn certificates_are_consistent_with_fibers(t in (1usize..=9).prop_flat_map(|n| proptest::collection::vec(0..n, n))) {
        let f = endo(&t);
        if let Some(c) = certify_finite(&f).certificate() {
            prop_assert!(c.is_consistent());
            let x0 = c.x0;
            prop_assert_ne!(t[x0], x0);
            let n = (0..t.len()).filter(|&x| x != x0).map(|x| f.fiber(x).unwrap().len()).max().unwrap_or(0) as u64;
            let m = f.fiber2(x0).unwrap().len() as u64;
            prop_assert!(m > n.max(1).pow(3));
            // the first qualifying point in index order
            for y in 0..x0 {
                let ny = (0..t.len()).filter(|&x| x != y).map(|x| f.fiber(x).unwrap().len()).max().unwrap_or(0) as u64;
                prop_assert!(t[y] == y || f.fiber2(y).unwrap().len() as u64 <= ny.max(1).pow(3));
            }
        }
    }
}
