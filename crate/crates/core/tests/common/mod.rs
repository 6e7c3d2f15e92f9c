#![allow(dead_code)]

use noniterate::endo::LabeledEndofunction;
use noniterate::symbolic::RayMap;
use noniterate::{CircleMap, Endofunction, ExactScalar, PlMap, Rational};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

pub fn rays(json: &str) -> RayMap {
    serde_json::from_str(json).expect("corpus rule file")
}

/// A finite rule file as a labelled table.
pub fn finite(json: &str) -> LabeledEndofunction {
    rays(json).to_finite().expect("finite families").map
}

pub fn remark2() -> (LabeledEndofunction, LabeledEndofunction) {
    (
        finite(include_str!("../../../../corpus/remark2_f.json")),
        finite(include_str!("../../../../corpus/remark2_g.json")),
    )
}

pub fn remark3() -> (LabeledEndofunction, LabeledEndofunction) {
    (
        finite(include_str!("../../../../corpus/remark3_f.json")),
        finite(include_str!("../../../../corpus/remark3_g.json")),
    )
}

pub fn remark4() -> (RayMap, RayMap) {
    (rays(include_str!("../../../../corpus/remark4_f.json")), rays(include_str!("../../../../corpus/remark4_g.json")))
}

pub fn six_point() -> LabeledEndofunction {
    let file: noniterate::endo::EndoFile =
        serde_json::from_str(include_str!("../../../../corpus/c1_six_point.json")).unwrap();
    LabeledEndofunction::try_from(file).unwrap()
}

pub fn f1() -> PlMap {
    serde_json::from_str(include_str!("../../../../corpus/f1.json")).unwrap()
}

pub fn f2() -> PlMap {
    serde_json::from_str(include_str!("../../../../corpus/f2.json")).unwrap()
}

pub fn five_breakpoint() -> CircleMap {
    serde_json::from_str(include_str!("../../../../corpus/circle_five_breakpoint.json")).unwrap()
}

pub fn idx(f: &LabeledEndofunction, label: &str) -> usize {
    f.index_of(label).unwrap_or_else(|| panic!("no point {label}"))
}

/// Every table on `n` points, in lexicographic order.
pub fn all_tables(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}

/// Naive composition used as an oracle: `g` applied `k` times.
pub fn naive_iterate(g: &[usize], k: u32) -> Vec<usize> {
    (0..g.len())
        .map(|mut x| {
            for _ in 0..k {
                x = g[x];
            }
            x
        })
        .collect()
}

/// Lexicographically smallest `g` with `g^k = f`, by brute force.
pub fn naive_root(f: &[usize], k: u32) -> Option<Vec<usize>> {
    all_tables(f.len()).find(|g| naive_iterate(g, k) == f)
}

pub fn endo(t: &[usize]) -> Endofunction {
    Endofunction::new(t.to_vec()).unwrap()
}
