mod common;

use common::{all_tables, endo, idx, naive_iterate, naive_root, remark2, remark3, six_point};
use noniterate::root_solver::{find_root, has_root_up_to, verify_root, RootQuery, RootStatus, DEFAULT_BUDGET};
use noniterate::Endofunction;
use proptest::prelude::*;

fn solve(f: &Endofunction, n: u32) -> noniterate::root_solver::RootResult {
    find_root(&RootQuery::new(f.clone(), n)).unwrap()
}

#[test]
fn identity_root_is_identity() {
    let r = solve(&Endofunction::identity(5), 2);
    assert_eq!(r.status, RootStatus::Found);
    assert_eq!(r.witness, Some(Endofunction::identity(5)));
}

#[test]
fn constant_map_has_a_square_root() {
    let (f, g) = remark2();
    let r = solve(&f.map, 2);
    assert_eq!(r.status, RootStatus::Found);
    assert!(verify_root(&f.map, r.witness.as_ref().unwrap(), 2).unwrap());
    // the published root: x_j -> x_{j+4} for j <= -5, everything else -> x_0
    for j in -8..=0 {
        let want = if j <= -5 { format!("x_{}", j + 4) } else { "x_0".to_string() };
        assert_eq!(g.label(g.map.apply(idx(&g, &format!("x_{j}")))), want);
    }
    assert!(verify_root(&f.map, &g.map, 2).unwrap());
}

#[test]
fn six_point_map_has_no_root() {
    let f = six_point().map;
    for n in 2..=4 {
        assert_eq!(solve(&f, n).status, RootStatus::None, "order {n}");
    }
    // independent check over all 6^6 tables
    for n in 2..=3 {
        assert_eq!(naive_root(f.table(), n), None);
    }
}

#[test]
fn three_cycle_root_is_its_square() {
    let f = Endofunction::cycle(3);
    let r = solve(&f, 2);
    assert_eq!(r.status, RootStatus::Found);
    let g = r.witness.unwrap();
    assert_eq!(g, f.iterate(2));
    assert_eq!(g.iterate(2), f.iterate(4));
}

#[test]
fn has_root_up_to_examples() {
    for report in has_root_up_to(&Endofunction::identity(4), 4, DEFAULT_BUDGET).unwrap() {
        assert_eq!(report.outcome.unwrap().status, RootStatus::Found);
    }
    let (f, _) = remark3();
    let reports = has_root_up_to(&f.map, 2, DEFAULT_BUDGET).unwrap();
    let r = reports[0].outcome.as_ref().unwrap();
    assert_eq!(r.status, RootStatus::Found);
    assert!(verify_root(&f.map, r.witness.as_ref().unwrap(), 2).unwrap());
    let reports = has_root_up_to(&six_point().map, 4, DEFAULT_BUDGET).unwrap();
    assert_eq!(reports.iter().map(|r| r.order).collect::<Vec<_>>(), vec![2, 3, 4]);
    assert!(reports.iter().all(|r| r.outcome.as_ref().unwrap().status == RootStatus::None));
}

#[test]
fn verify_root_examples() {
    let (f, g) = remark3();
    assert!(verify_root(&f.map, &g.map, 2).unwrap());
    assert!(verify_root(&Endofunction::identity(3), &Endofunction::cycle(3), 3).unwrap());
    assert!(verify_root(&Endofunction::identity(3), &Endofunction::identity(4), 2).is_err());
}

/// Status and lexicographically smallest witness agree with brute force for
/// every map on at most five points, orders 2 and 3.
#[test]
fn agrees_with_naive_enumeration_up_to_five_points() {
    for n in 1..=5 {
        let tables: Vec<Vec<usize>> = all_tables(n).collect();
        for order in [2, 3] {
            // index every table by its order-th power once
            let mut smallest: std::collections::HashMap<Vec<usize>, Vec<usize>> = std::collections::HashMap::new();
            for g in &tables {
                smallest.entry(naive_iterate(g, order)).or_insert_with(|| g.clone());
            }
            for t in &tables {
                let r = solve(&endo(t), order);
                let want = smallest.get(t);
                assert_eq!(r.status == RootStatus::Found, want.is_some(), "f = {t:?}, n = {order}");
                assert_eq!(r.witness.map(Endofunction::into_table).as_ref(), want, "f = {t:?}, n = {order}");
            }
        }
    }
}

#[test]
fn roots_commute_with_f() {
    for t in all_tables(4) {
        for g in all_tables(4) {
            if naive_iterate(&g, 2) == t {
                let fg: Vec<usize> = (0..4).map(|x| t[g[x]]).collect();
                let gf: Vec<usize> = (0..4).map(|x| g[t[x]]).collect();
                assert_eq!(fg, gf);
            }
        }
    }
}

#[test]
fn count_all_matches_naive_count() {
    for t in all_tables(4).step_by(7) {
        let want = all_tables(4).filter(|g| naive_iterate(g, 2) == t).count() as u64;
        let r = find_root(&RootQuery::new(endo(&t), 2).count_all()).unwrap();
        assert_eq!(r.count, Some(want), "f = {t:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn witnesses_verify_and_search_is_deterministic(
        t in (1usize..=8).prop_flat_map(|n| proptest::collection::vec(0..n, n)),
        order in 2u32..=4,
    ) {
        let f = endo(&t);
        let a = solve(&f, order);
        if let Some(g) = &a.witness {
            prop_assert!(verify_root(&f, g, order).unwrap());
        }
        prop_assert_eq!(a.status == RootStatus::Found, a.witness.is_some());
        prop_assert_eq!(solve(&f, order), a.clone());
        let par = find_root(&RootQuery::new(f.clone(), order).parallel(true)).unwrap();
        prop_assert_eq!(par.status, a.status);
    }
}
