//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use noniterate::certifier::{certify_finite, certify_finite_with, certify_profiled, AbstainReason, Criterion};
use noniterate::circle::{chordal_distance, Angle, Arc, CirclePartition, ComparableReal, Indeterminate};
use noniterate::constructor::{
    audit_circle, construct_non_iterate, construct_non_iterate_interval, CircleConstruction,
};
use noniterate::endo::LabeledEndofunction;
use noniterate::root_solver::{find_root, verify_root, RootQuery, RootStatus};
use noniterate::sets::Interval;
use noniterate::symbolic::{block_verify_ex4, RayMap, RayPoint};
use noniterate::{Cardinal, Case, CircleMap, Endofunction, ExactScalar, PlMap, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

fn rays(name: &str) -> RayMap {
    serde_json::from_str(&read(name)).unwrap()
}

fn finite(name: &str) -> LabeledEndofunction {
    rays(name).to_finite().unwrap().map
}

fn cli_json(args: &[&str]) -> (i32, Value) {
    let argv = ["noniterate"].iter().chain(args).chain(&["--format", "json"]).copied().collect::<Vec<_>>();
    let (code, out) = noniterate_cli::run(argv);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))
}

fn certify_pl_c3(
    file: &str,
    x0: &str,
    f1_part: Option<Interval<Rational>>,
    f2_part: Option<Interval<Rational>>,
) -> Outcome {
    let start = Instant::now();
    let (code, v) = cli_json(&["certify-pl", "--input", &corpus(file).display().to_string()]);
    within(start, Duration::from_secs(1), "certify-pl")?;
    let c = &v["certificate"];
    check(code == 0 && c["case"] == "C3" && c["x0"] == x0, || format!("exit {code}, {v}"))?;
    check(c["evidence"]["fiber2"] == "continuum", || format!("fiber2 {}", c["evidence"]["fiber2"]))?;
    check(c["evidence"]["max_other_fiber"].get("finite").is_some(), || "max_other_fiber not finite".into())?;
    // the sets themselves, recomputed through the library
    let f: PlMap = serde_json::from_str(&read(file)).unwrap();
    let x = noniterate::scalar::parse_scalar::<Rational>(x0).unwrap();
    if let Some(part) = f1_part {
        check(f.preimage_point(&x).contains_interval(&part), || format!("f^-1 lacks {part}"))?;
    }
    if let Some(part) = f2_part {
        check(f.preimage2_point(&x).contains_interval(&part), || format!("f^-2 lacks {part}"))?;
    }
    Ok(format!("C3 at {x0}, N = {}, {:?}", c["evidence"]["max_other_fiber"]["finite"], start.elapsed()))
}

fn c1() -> Outcome {
    certify_pl_c3("f1.json", "3/4", Some(Interval::closed(q(1, 4), q(1, 2))), Some(Interval::closed(q(1, 12), q(1, 6))))
}

fn c2() -> Outcome {
    certify_pl_c3("f2.json", "1/4", Some(Interval::open(q(1, 2), q(3, 4))), None)
}

fn c3() -> Outcome {
    let mut notes = Vec::new();
    for name in ["remark2", "remark3"] {
        let start = Instant::now();
        let (f, g) = (finite(&format!("{name}_f.json")), finite(&format!("{name}_g.json")));
        check(verify_root(&f.map, &g.map, 2).unwrap(), || format!("{name}: g^2 != f"))?;
        within(start, Duration::from_secs(1), name)?;
        notes.push(format!("{name} {:?}", start.elapsed()));
    }
    let start = Instant::now();
    let (f, g) = (rays("remark4_f.json"), rays("remark4_g.json"));
    check(g.compose(&g).unwrap().equals(&f), || "remark4: g^2 != f symbolically".into())?;
    within(start, Duration::from_secs(1), "remark4")?;
    notes.push(format!("remark4 symbolic {:?}", start.elapsed()));
    Ok(notes.join(", "))
}

fn c4() -> Outcome {
    let mut notes = Vec::new();
    for (file, want) in [
        ("remark2_f.json", "fixed_point_obstruction"),
        ("remark3_f.json", "fibers_too_large"),
        ("remark4_f.json", "strict_inequality_fails"),
    ] {
        let (code, v) = cli_json(&["certify", "--input", &corpus(file).display().to_string()]);
        check(code == 2 && v["certificate"].is_null() && v["reason"] == want, || format!("{file}: exit {code}, {v}"))?;
        notes.push(format!("{file}: {want}"));
    }
    // the counts behind the last two reasons
    let f3 = finite("remark3_f.json");
    let x0 = f3.index_of("x_0").unwrap();
    let n = (0..f3.map.len()).filter(|&x| x != x0).map(|x| f3.map.fiber(x).unwrap().len()).max().unwrap();
    let m = f3.map.fiber2(x0).unwrap().len();
    check(n == 9 && m == 9 && m <= n.pow(3), || format!("remark3 N = {n}, #f^-2 = {m}"))?;
    let m4 = rays("remark4_f.json").materialize(2).unwrap();
    let a = certify_finite(&m4.map.map);
    let a = a.abstention().ok_or("truncation certified")?;
    let p = a.closest.as_ref().unwrap();
    check(a.boundary && p.fiber2 == Cardinal::Finite(8) && p.max_other_fiber == Cardinal::Finite(2), || {
        format!("{a:?}")
    })?;
    Ok(notes.join("; "))
}

fn c5() -> Outcome {
    let (f, g) = (rays("remark4_f.json"), rays("remark4_g.json"));
    let x0 = RayPoint::new("x", 0);
    let ff = f.compose(&f).unwrap();
    let fiber2 = ff.fiber_cardinal(&x0).unwrap();
    let other = f.max_fiber_excluding(&x0).unwrap();
    check(fiber2 == Cardinal::Finite(8), || format!("#f^-2(x0) = {fiber2}"))?;
    check(other == Cardinal::Finite(2), || format!("max other fiber = {other}"))?;
    check(g.compose(&g).unwrap().equals(&f), || "g^2 != f".into())?;
    let profile = f.fiber_profile(&x0).unwrap();
    let cert = certify_profiled([profile]).unwrap();
    check(cert.abstention().is_some_and(|a| a.reason == AbstainReason::StrictInequalityFails), || format!("{cert:?}"))?;
    Ok("#f^-2(x0) = 8 = 2^3, certifier abstains, g^2 = f".into())
}

fn fuzz(criterion: Criterion, seed: u64, maps: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut certified, mut violations) = (0, 0);
    for _ in 0..maps {
        let n = rng.gen_range(1..=7);
        let f = Endofunction::new((0..n).map(|_| rng.gen_range(0..n)).collect()).unwrap();
        if certify_finite_with(&f, criterion).certificate().is_none() {
            continue;
        }
        certified += 1;
        for order in [2, 3] {
            let r = find_root(&RootQuery::new(f.clone(), order)).expect("exhaustive search within budget");
            if r.status == RootStatus::Found {
                violations += 1;
                break;
            }
        }
    }
    (certified, violations)
}

fn c6() -> Outcome {
    let start = Instant::now();
    let (certified, violations) = fuzz(Criterion::SecondPreimage, 20_240_601, 10_000);
    check(violations == 0, || format!("{violations} certified maps have roots"))?;
    check(certified > 0, || "no certificates issued; the test would be vacuous".into())?;
    let (control_certified, control_violations) = fuzz(Criterion::FirstPreimageOnly, 20_240_601, 10_000);
    check(control_violations >= 1, || "negative control found no violation".into())?;
    within(start, Duration::from_secs(300), "fuzz")?;
    Ok(format!(
        "10000 maps, {certified} certificates, 0 violations; first-preimage control: {control_violations} of {control_certified} violated; {:?}",
        start.elapsed()
    ))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let tables: Vec<Vec<usize>> = (0..256usize).map(|c| (0..4).map(|i| (c >> (2 * i)) & 3).collect()).collect();
    let square = |g: &[usize]| -> Vec<usize> { (0..4).map(|x| g[g[x]]).collect() };
    let mut agree = 0;
    for f in &tables {
        let naive = tables.iter().any(|g| square(g) == *f);
        let r = find_root(&RootQuery::new(Endofunction::new(f.clone()).unwrap(), 2)).unwrap();
        check((r.status == RootStatus::Found) == naive, || format!("f = {f:?}: solver {:?}, naive {naive}", r.status))?;
        agree += 1;
    }
    within(start, Duration::from_secs(10), "enumeration")?;
    let with_root = tables.iter().filter(|f| tables.iter().any(|g| square(g) == **f)).count();
    Ok(format!("{agree}/256 agree ({with_root} have square roots), {:?}", start.elapsed()))
}

/// Exact strict comparison, counting undecided ones.
fn lt(d: ComparableReal, bound: &Rational, undecided: &mut Vec<Indeterminate>) -> bool {
    match d.lt_rational(bound) {
        Ok(b) => b,
        Err(e) => {
            undecided.push(e);
            false
        }
    }
}

/// Re-derives the trace invariants from the trace's raw data.
fn recheck_circle(
    h: &CircleMap,
    eps: &Rational,
    out: &CircleConstruction,
    undecided: &mut Vec<Indeterminate>,
) -> Result<(), String> {
    let t = &out.trace;
    let k = t.partition.len();
    let z = &t.partition;
    let w = &t.images;
    let half_delta = t.delta.clone() / Rational::from_int(2);
    for j in 0..k {
        let next = (j + 1) % k;
        check(lt(chordal_distance(&z[j], &z[next]), &half_delta, undecided), || format!("mesh at {j}"))?;
        check(lt(chordal_distance(&h.eval(&z[j]), &w[j]), &(eps.clone() / Rational::from_int(20)), undecided), || {
            format!("|h(z_j) - w_j| at {j}")
        })?;
        check(w[j] != z[j], || format!("w_{j} = z_{j}"))?;
        check(lt(chordal_distance(&w[j], &w[next]), &(eps.clone() / Rational::from_int(5)), undecided), || {
            format!("|w_(j+1) - w_j| at {j}")
        })?;
    }
    let mut sorted = w.clone();
    sorted.sort();
    sorted.dedup();
    check(sorted.len() == k, || "w_j not distinct".into())?;

    let f0 = &t.f0;
    let j_arc = &t.j_arc;
    let p = CirclePartition::new(z.clone()).unwrap();
    // (a) J inside the interior of the range of f0
    let range = f0.range();
    let inside_range = (0..=16).all(|i| range.contains(j_arc.at(&q(i, 16)).t()))
        && range.contains(j_arc.start.rotate(&-(j_arc.length() / Rational::from_int(64))).t())
        && range.contains(j_arc.end.rotate(&(j_arc.length() / Rational::from_int(64))).t());
    check(inside_range, || "(a) J not inside the range".into())?;
    // (b) J inside an open partition arc, (c) f0(J) inside an open partition arc
    let r = p.locate(&j_arc.midpoint());
    check(p.arc(r).contains_arc_in_interior(j_arc), || "(b)".into())?;
    let image = f0.image_of_subarc(j_arc).map_err(|e| e.to_string())?.ok_or("f0 constant on J")?;
    let r2 = p.locate(&image.midpoint());
    check(p.arc(r2).contains_arc_in_interior(&image), || "(c)".into())?;
    // (d) f0(J) and J disjoint
    check(!image.meets(j_arc), || "(d)".into())?;
    // (e) f0^-1(J) and J disjoint: no preimage component touches J
    let pre = f0.preimage_arc(j_arc);
    let j_set = j_arc.to_set();
    let touches = pre.components().iter().any(|c| j_set.components().iter().any(|d| c.intersect(d).is_some()));
    check(!touches, || format!("(e) f0^-1(J) = {pre}"))?;
    // (f) f = f0 off J, constant x0 on K, f(x0) != x0
    check(out.f.agrees_outside(f0, j_arc), || "(f)".into())?;
    let k_arc: &Arc<Rational> = &t.k_arc;
    check(j_arc.contains_arc_in_interior(k_arc), || "K not inside J".into())?;
    check((0..=8).all(|i| out.f.eval(&k_arc.at(&q(i, 8))) == t.x0), || "f not constant on K".into())?;
    check(out.f.eval(&t.x0) != t.x0, || "f(x0) = x0".into())?;
    // audit replay agrees and every named condition holds
    let (replayed, _) = audit_circle(h, t);
    check(replayed == t.checks && replayed.iter().all(|c| c.holds), || "audit replay differs or fails".into())?;
    for tag in ["(a)", "(b)", "(c)", "(d)", "(e)", "(f)"] {
        check(replayed.iter().any(|c| c.name.starts_with(tag) && c.holds), || format!("audit lacks {tag}"))?;
    }
    Ok(())
}

fn circle_cases() -> Vec<(&'static str, CircleMap)> {
    let p3 = CirclePartition::uniform(3).unwrap();
    vec![
        ("identity", CircleMap::identity(p3.clone())),
        ("rotation 1/3", CircleMap::rotation(p3, &q(1, 3))),
        ("five-breakpoint", serde_json::from_str(&read("circle_five_breakpoint.json")).unwrap()),
    ]
}

fn c8(undecided: &mut Vec<Indeterminate>) -> Outcome {
    let mut notes = Vec::new();
    for (name, h) in circle_cases() {
        for eps in [q(1, 2), q(1, 10)] {
            let start = Instant::now();
            let out = construct_non_iterate(&h, &eps).map_err(|e| format!("{name} at {eps}: {e}"))?;
            check(lt(out.f.sup_distance(&h), &eps, undecided), || format!("{name} at {eps}: rho >= eps"))?;
            recheck_circle(&h, &eps, &out, undecided).map_err(|e| format!("{name} at {eps}: {e}"))?;
            let cert = certify_profiled([out.f.fiber_profile(&out.trace.x0)]).unwrap();
            check(cert.certificate().is_some_and(|c| c.case == Case::C3), || format!("{name} at {eps}: no C3"))?;
            within(start, Duration::from_secs(10), &format!("{name} at {eps}"))?;
            notes.push(format!("{name}/{eps} k={} {:.1?}", out.trace.k, start.elapsed()));
        }
    }
    Ok(notes.join(", "))
}

fn c9() -> Outcome {
    let f1: PlMap = serde_json::from_str(&read("f1.json")).unwrap();
    let mut notes = Vec::new();
    for (name, h) in [("identity", PlMap::identity()), ("f1", f1), ("constant 1/2", PlMap::constant(q(1, 2)))] {
        for eps in [q(1, 2), q(1, 10)] {
            let start = Instant::now();
            let out = construct_non_iterate_interval(&h, &eps).map_err(|e| format!("{name} at {eps}: {e}"))?;
            check(out.f.sup_distance(&h) < eps, || format!("{name} at {eps}: sup >= eps"))?;
            let cert = out.f.certify().unwrap();
            let c = cert.certificate().ok_or_else(|| format!("{name} at {eps}: no certificate"))?;
            check(c.case == Case::C3 && c.is_consistent(), || format!("{name} at {eps}: {c:?}"))?;
            within(start, Duration::from_secs(10), &format!("{name} at {eps}"))?;
            notes.push(format!("{name}/{eps} {:.1?}", start.elapsed()));
        }
    }
    Ok(notes.join(", "))
}

fn c10() -> Outcome {
    let report = block_verify_ex4();
    let failed: Vec<&String> = report.assertions.iter().filter(|a| !a.holds).map(|a| &a.name).collect();
    check(report.assertions.len() == 5 && failed.is_empty(), || format!("failed: {failed:?}"))?;
    Ok(format!("5/5 assertions; f^-2(x0) = {:?}", report.second_preimage))
}

fn c11(undecided: &[Indeterminate]) -> Outcome {
    let a = |n, d| Angle::new(q(n, d)).unwrap();
    for (d, want) in [((0, 1), q(0, 1)), ((1, 6), q(1, 1)), ((1, 2), q(2, 1))] {
        let got = chordal_distance(&a(0, 1), &a(d.0, d.1)).exact_value();
        check(got.as_ref() == Some(&want), || format!("d = {}/{}: {got:?}", d.0, d.1))?;
        let shifted = chordal_distance(&a(1, 3), &Angle::wrap(q(1, 3) + q(d.0, d.1))).exact_value();
        check(shifted.as_ref() == Some(&want), || "not rotation invariant".into())?;
    }
    check(undecided.is_empty(), || format!("{} undecided comparisons: {:?}", undecided.len(), undecided.first()))?;
    Ok("chordal 0, 1, 2 exact; no undecided comparison in the circle matrix".into())
}

fn main() {
    let mut undecided = Vec::new();
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let mut run = |n: u32, title: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        results.push((n, title, out, start.elapsed()));
    };
    run(1, "f1 certification", &mut c1);
    run(2, "f2 certification", &mut c2);
    run(3, "published roots verify", &mut c3);
    run(4, "abstention on sharp instances", &mut c4);
    run(5, "sharpness of N^3", &mut c5);
    run(6, "soundness fuzz", &mut c6);
    run(7, "naive enumerator equivalence", &mut c7);
    run(8, "density on the circle", &mut || c8(&mut undecided));
    run(9, "density on the interval", &mut c9);
    run(10, "measure analogue fails", &mut c10);
    let snapshot = undecided.clone();
    run(11, "exact chordal anchors", &mut || c11(&snapshot));

    for (n, title, out, took) in &results {
        match out {
            Ok(detail) => println!("PASS criterion {n:>2} {title} [{took:.2?}]: {detail}"),
            Err(why) => println!("FAIL criterion {n:>2} {title} [{took:.2?}]: {why}"),
        }
    }
    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria pass", results.len());
}
