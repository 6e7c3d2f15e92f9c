mod common;

use common::{f1, f2, q};
use noniterate::pl_interval::Piece;
use noniterate::sets::{CardinalSet, Interval};
use noniterate::{Cardinal, Case, PlMap, Rational};
use num_traits::Signed;
use proptest::prelude::*;

#[test]
fn eval_examples() {
    assert_eq!(f1().eval(&q(1, 4)).unwrap(), q(3, 4));
    assert_eq!(f1().eval(&q(3, 4)).unwrap(), q(0, 1));
    assert_eq!(f2().eval(&q(5, 8)).unwrap(), q(1, 4));
    assert!(f1().eval(&q(5, 4)).is_err());
}

#[test]
fn compose_examples() {
    assert_eq!(PlMap::identity().compose(&f1()), f1());
    assert_eq!(f1().compose(&f1()).eval(&q(1, 12)).unwrap(), q(3, 4));
    assert_eq!(PlMap::constant(q(1, 2)).compose(&f2()), PlMap::constant(q(1, 2)));
}

#[test]
fn preimage_examples() {
    let p = f1().preimage_point(&q(3, 4));
    assert_eq!(p, CardinalSet::interval(Interval::closed(q(1, 4), q(1, 2))));
    assert_eq!(p.cardinality(), Cardinal::Continuum);

    let p = f1().preimage_point(&q(1, 2));
    assert_eq!(p, CardinalSet::points([q(1, 6), q(7, 12)]));
    assert_eq!(p.cardinality(), Cardinal::Finite(2));

    let p = f2().preimage_point(&q(1, 4));
    let want = CardinalSet::from_parts([q(1, 16), q(7, 8)], [Interval::open(q(1, 2), q(3, 4))]);
    assert_eq!(p, want);
}

#[test]
fn preimage2_examples() {
    let p = f1().preimage2_point(&q(3, 4));
    assert!(p.contains_interval(&Interval::closed(q(1, 12), q(1, 6))));
    assert_eq!(p.cardinality(), Cardinal::Continuum);
    assert_eq!(PlMap::identity().preimage2_point(&q(1, 2)), CardinalSet::points([q(1, 2)]));
    let p = f2().preimage2_point(&q(1, 4));
    assert!(p.contains_interval(&Interval::open(q(1, 8), q(3, 16))));
}

#[test]
fn fiber_profile_examples() {
    let p = f1().fiber_profile(&q(3, 4)).unwrap();
    assert!(p.not_fixed);
    assert_eq!(p.fiber2, Cardinal::Continuum);
    let Cardinal::Finite(k) = p.max_other_fiber else { panic!("{:?}", p.max_other_fiber) };
    assert!(k as usize <= f1().pieces().len());
    assert!(!PlMap::identity().fiber_profile(&q(1, 2)).unwrap().not_fixed);
    let p = f2().fiber_profile(&q(1, 4)).unwrap();
    assert_eq!(f2().eval(&q(1, 4)).unwrap(), q(1, 1));
    assert!(p.not_fixed && p.fiber2 == Cardinal::Continuum && p.max_other_fiber.is_finite());
}

#[test]
fn sup_distance_examples() {
    assert_eq!(f1().sup_distance(&f1()), q(0, 1));
    assert_eq!(PlMap::constant(q(0, 1)).sup_distance(&PlMap::constant(q(1, 1))), q(1, 1));
    assert_eq!(f1().sup_distance(&PlMap::constant(q(3, 4))), q(3, 4));
}

#[test]
fn sup_distance_uses_one_sided_limits() {
    // 0 on [0,1/2), 1 on [1/2,1]: distance to the identity is never attained at 1/2-
    let pieces = vec![
        Piece::new(Interval::new(q(0, 1), q(1, 2), true, false), q(0, 1), q(0, 1)),
        Piece::new(Interval::new(q(1, 2), q(1, 1), true, true), q(0, 1), q(1, 1)),
    ];
    let step = PlMap::new(pieces).unwrap();
    assert_eq!(step.sup_distance(&PlMap::identity()), q(1, 2));
}

#[test]
fn f1_and_f2_certify_c3() {
    for (f, x0) in [(f1(), q(3, 4)), (f2(), q(1, 4))] {
        let c = f.certify().unwrap();
        let c = c.certificate().unwrap();
        assert_eq!((c.case, &c.x0), (Case::C3, &x0));
    }
}

#[test]
fn json_names_the_bad_field() {
    let err = serde_json::from_str::<PlMap>(
        r#"{"pieces": [{"lo": "0", "hi": "1", "lo_closed": true, "hi_closed": true, "a": "x", "b": "0"}]}"#,
    )
    .unwrap_err()
    .to_string();
    assert!(err.contains('x'), "{err}");
    let err = serde_json::from_str::<PlMap>(
        r#"{"pieces": [{"lo": "0", "hi": "1/2", "lo_closed": true, "hi_closed": true, "a": "0", "b": "0"}]}"#,
    );
    assert!(err.is_err());
}

/// A random PL self-map of `[0,1]`: breakpoints on a grid of `1/den`, each
/// piece with its own end values, so jumps occur. Some pieces are flat.
fn pl_map() -> impl Strategy<Value = PlMap> {
    (2i64..=12, 1usize..=5)
        .prop_flat_map(|(den, k)| {
            let cuts = proptest::sample::subsequence((1..den).collect::<Vec<_>>(), (k - 1).min(den as usize - 1));
            let ends = proptest::collection::vec((0..=den, 0..=den, any::<bool>(), any::<bool>()), k);
            (Just(den), cuts, ends)
        })
        .prop_map(|(den, cuts, ends)| {
            let mut bounds = vec![0];
            bounds.extend(cuts);
            bounds.push(den);
            let mut pieces = Vec::new();
            for (i, w) in bounds.windows(2).enumerate() {
                let (lo, hi) = (q(w[0], den), q(w[1], den));
                let (mut vl, vh, flat, open_hi) = ends[i % ends.len()];
                if flat {
                    vl = vh;
                }
                let last = w[1] == den;
                let (vl, vh) = (q(vl, den), q(vh, den));
                let a = (vh.clone() - vl.clone()) / (hi.clone() - lo.clone());
                let b = vl - a.clone() * lo.clone();
                // pieces are [lo, hi) or (lo, hi]; a piece ending open hands hi to the next one
                let lo_closed = i == 0 || pieces.last().is_some_and(|p: &Piece<Rational>| !p.hi_closed);
                let hi_closed = last || !open_hi;
                pieces.push(Piece::new(Interval::new(lo, hi, lo_closed, hi_closed), a, b));
            }
            PlMap::new(pieces).expect("valid random map")
        })
}

fn point() -> impl Strategy<Value = Rational> {
    (1i64..=60).prop_flat_map(|d| (0..=d).prop_map(move |n| q(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn point_lies_in_preimage_of_its_value(f in pl_map(), x in point()) {
        let y = f.eval(&x).unwrap();
        prop_assert!(f.preimage_point(&y).contains(&x));
    }

    #[test]
    fn second_preimage_matches_composition(f in pl_map(), y in point()) {
        prop_assert_eq!(f.preimage2_point(&y), f.compose(&f).preimage_point(&y));
    }

    #[test]
    fn compose_agrees_pointwise(f in pl_map(), g in pl_map(), xs in proptest::collection::vec(point(), 100)) {
        let h = f.compose(&g);
        let mut pts = xs;
        pts.extend(f.breakpoints());
        pts.extend(g.breakpoints());
        for x in &pts {
            prop_assert_eq!(h.eval(x).unwrap(), f.eval(&g.eval(x).unwrap()).unwrap());
        }
    }

    #[test]
    fn continuum_iff_flat_piece_hits(f in pl_map(), y in point()) {
        let flat_hit = f.pieces().iter().any(|p| p.is_flat() && p.b == y);
        prop_assert_eq!(f.preimage_point(&y).cardinality() == Cardinal::Continuum, flat_hit);
    }

    #[test]
    fn preimage_members_map_to_target(f in pl_map(), y in point(), x in point()) {
        prop_assert_eq!(f.preimage_point(&y).contains(&x), f.eval(&x).unwrap() == y);
    }

    #[test]
    fn sup_distance_bounds_samples(f in pl_map(), g in pl_map(), xs in proptest::collection::vec(point(), 60)) {
        let s = f.sup_distance(&g);
        for x in &xs {
            let d = (f.eval(x).unwrap() - g.eval(x).unwrap()).abs();
            prop_assert!(d <= s);
        }
        // approached from inside some piece of the common refinement
        let mut cuts = f.breakpoints();
        cuts.extend(g.breakpoints());
        let tiny = q(1, 1_000_000);
        let slack = q(1, 1000);
        let near = cuts.iter().flat_map(|c| [c.clone(), c.clone() - tiny.clone(), c.clone() + tiny.clone()])
            .filter(|t| *t >= q(0, 1) && *t <= q(1, 1))
            .map(|t| (f.eval(&t).unwrap() - g.eval(&t).unwrap()).abs())
            .max().unwrap();
        prop_assert!(near + slack >= s);
    }

    #[test]
    fn json_round_trip(f in pl_map()) {
        let text = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<PlMap>(&text).unwrap(), f);
    }
}
