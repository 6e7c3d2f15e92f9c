//! The `verify-paper` suite: every published instance, replayed from the
//! corpus. Each anchor is isolated, so a broken file fails only its own line.

use std::path::{Path, PathBuf};

use noniterate::certifier::{certify_finite, certify_profiled, AbstainReason, Case};
use noniterate::constructor::{construct_non_iterate, construct_non_iterate_interval};
use noniterate::root_solver::{find_root, verify_root, RootQuery, RootStatus};
use noniterate::sets::Interval;
use noniterate::symbolic::{block_verify_ex4, RayMap, RayPoint};
use noniterate::{Cardinal, Certification, CircleMap, Endofunction, ExactScalar, PlMap, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{self, InputError};

pub const CORPUS_FILES: [&str; 12] = [
    "f1.json",
    "f2.json",
    "remark2_f.json",
    "remark2_g.json",
    "remark3_f.json",
    "remark3_g.json",
    "remark4_f.json",
    "remark4_g.json",
    "c1_six_point.json",
    "circle_identity.json",
    "circle_rotation_third.json",
    "circle_five_breakpoint.json",
];

#[derive(Clone, Debug, Serialize)]
pub struct AnchorResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Corpus {
    dir: PathBuf,
}

impl Corpus {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn interval(&self, name: &str) -> Result<PlMap, String> {
        input::load_interval(&self.path(name)).map_err(|e| e.to_string())
    }

    fn circle(&self, name: &str) -> Result<CircleMap, String> {
        input::load_circle(&self.path(name)).map_err(|e| e.to_string())
    }

    fn rays(&self, name: &str) -> Result<RayMap, String> {
        input::load_rays(&self.path(name)).map_err(|e| e.to_string())
    }
}

fn interval_c3(f: &PlMap, x0: Rational, f1_part: Interval<Rational>, f2_part: Option<Interval<Rational>>) -> Check {
    let cert = f.certify().map_err(|e| e.to_string())?;
    let c = cert.certificate().ok_or("certifier abstained")?;
    ensure(c.case == Case::C3 && c.x0 == x0, || format!("got {} at {}", c.case, c.x0))?;
    ensure(c.evidence.fiber2 == Cardinal::Continuum && c.evidence.max_other_fiber.is_finite(), || {
        format!("{:?}", c.evidence)
    })?;
    let (p1, p2) = (f.preimage_point(&x0), f.preimage2_point(&x0));
    ensure(p1.contains_interval(&f1_part), || format!("f^-1(x0) = {p1}"))?;
    if let Some(part) = f2_part {
        ensure(p2.contains_interval(&part), || format!("f^-2(x0) = {p2}"))?;
    }
    Ok(format!("C3 at x0 = {x0}; f^-1(x0) = {p1}; f^-2(x0) = {p2}; N = {}", c.evidence.max_other_fiber))
}

fn anchor_f1(c: &Corpus) -> Check {
    let f = c.interval("f1.json")?;
    interval_c3(&f, q(3, 4), Interval::closed(q(1, 4), q(1, 2)), Some(Interval::closed(q(1, 12), q(1, 6))))
}

fn anchor_f2(c: &Corpus) -> Check {
    let f = c.interval("f2.json")?;
    interval_c3(&f, q(1, 4), Interval::open(q(1, 2), q(3, 4)), None)
}

fn finite_pair(
    c: &Corpus,
    f: &str,
    g: &str,
) -> Result<(noniterate::symbolic::Materialized, noniterate::symbolic::Materialized), String> {
    let (f, g) = (c.rays(f)?, c.rays(g)?);
    let mf = f.to_finite().ok_or("f is not finite")?;
    let mg = g.to_finite().ok_or("g is not finite")?;
    Ok((mf, mg))
}

fn abstains_with(f: &Endofunction, want: AbstainReason) -> Result<String, String> {
    match certify_finite(f) {
        Certification::Certified(c) => Err(format!("unexpected certificate at {}", c.x0)),
        Certification::Abstained(a) if a.reason == want => Ok(a.reason.describe().to_string()),
        Certification::Abstained(a) => Err(format!("abstained for the wrong reason: {:?}", a.reason)),
    }
}

fn anchor_remark2(c: &Corpus) -> Check {
    let (mf, mg) = finite_pair(c, "remark2_f.json", "remark2_g.json")?;
    ensure(verify_root(&mf.map.map, &mg.map.map, 2).map_err(|e| e.to_string())?, || "g^2 != f".into())?;
    let why = abstains_with(&mf.map.map, AbstainReason::FixedPointObstruction)?;
    let found = find_root(&RootQuery::new(mf.map.map.clone(), 2)).map_err(|e| e.to_string())?;
    ensure(found.status == RootStatus::Found, || "solver found no square root".into())?;
    Ok(format!("g^2 = f on {} points; certifier abstains ({why}); solver finds a root", mf.points.len()))
}

fn anchor_remark3(c: &Corpus) -> Check {
    let (mf, mg) = finite_pair(c, "remark3_f.json", "remark3_g.json")?;
    ensure(verify_root(&mf.map.map, &mg.map.map, 2).map_err(|e| e.to_string())?, || "g^2 != f".into())?;
    let x0 = mf.index_of(&RayPoint::new("x", 0)).ok_or("no x_0")?;
    let x2 = mf.index_of(&RayPoint::new("x", 2)).ok_or("no x_2")?;
    let (m, n) = (
        mf.map.map.fiber2(x0).map_err(|e| e.to_string())?.len(),
        mf.map.map.fiber(x2).map_err(|e| e.to_string())?.len(),
    );
    ensure(mf.map.map.apply(x0) != x0 && m > 8 && n == 9, || format!("#f^-2(x0) = {m}, #f^-1(x2) = {n}"))?;
    let why = abstains_with(&mf.map.map, AbstainReason::FibersTooLarge)?;
    Ok(format!("g^2 = f; #f^-2(x0) = {m} > 8 but #f^-1(x2) = {n}, so N^3 = {}; abstains ({why})", n.pow(3)))
}

fn anchor_remark4(c: &Corpus) -> Check {
    let (f, g) = (c.rays("remark4_f.json")?, c.rays("remark4_g.json")?);
    let g2 = g.compose(&g).map_err(|e| e.to_string())?;
    ensure(g2.equals(&f), || format!("g^2 differs from f:\n{g2}"))?;
    let m = f.materialize(2).map_err(|e| e.to_string())?;
    let x0 = m.index_of(&RayPoint::new("x", 0)).ok_or("no x_0")?;
    let fiber2 = m.map.map.fiber2(x0).map_err(|e| e.to_string())?.len();
    match certify_finite(&m.map.map) {
        Certification::Abstained(a) if a.reason == AbstainReason::StrictInequalityFails && a.boundary => {}
        other => return Err(format!("truncation should abstain at the boundary, got {other:?}")),
    }
    Ok(format!("g^2 = f symbolically; truncation to index 2 has #f^-2(x0) = {fiber2} = 2^3 and abstains"))
}

fn anchor_sharpness(c: &Corpus) -> Check {
    let (f, g) = (c.rays("remark4_f.json")?, c.rays("remark4_g.json")?);
    let x0 = RayPoint::new("x", 0);
    let profile = f.fiber_profile(&x0).map_err(|e| e.to_string())?;
    ensure(profile.fiber2 == Cardinal::Finite(8) && profile.max_other_fiber == Cardinal::Finite(2), || {
        format!("{profile:?}")
    })?;
    match certify_profiled([profile]).map_err(|e| e.to_string())? {
        Certification::Abstained(a) if a.reason == AbstainReason::StrictInequalityFails => {}
        other => return Err(format!("expected abstention, got {other:?}")),
    }
    ensure(g.compose(&g).map_err(|e| e.to_string())?.equals(&f), || "g^2 != f".into())?;
    Ok("#f^-2(x0) = 8 = N^3 with N = 2: certifier abstains and a square root exists".into())
}

fn anchor_six_point(c: &Corpus) -> Check {
    let (f, _) = input::load_finite(&c.path("c1_six_point.json"), 0).map_err(|e| e.to_string())?;
    let cert = certify_finite(&f.map);
    let cert = cert.certificate().ok_or("no certificate")?;
    ensure(cert.case == Case::C1 && f.label(cert.x0) == "x0", || format!("{cert:?}"))?;
    for n in 2..=4 {
        let r = find_root(&RootQuery::new(f.map.clone(), n)).map_err(|e| e.to_string())?;
        ensure(r.status == RootStatus::None, || format!("root of order {n} found"))?;
    }
    Ok(format!("C1 at x0: #f^-2 = {} > N^3 = 1; solver finds no root for n = 2, 3, 4", cert.evidence.fiber2))
}

fn anchor_ex4() -> Check {
    let report = block_verify_ex4();
    let failed: Vec<&str> = report.assertions.iter().filter(|a| !a.holds).map(|a| a.name.as_str()).collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    let pre: Vec<&str> = report.second_preimage.iter().map(String::as_str).collect();
    Ok(format!("all {} assertions hold; f^-2(x0) = {{{}}}", report.assertions.len(), pre.join(", ")))
}

fn anchor_circle_density(c: &Corpus) -> Check {
    let cells = [
        ("circle_identity.json", q(1, 2)),
        ("circle_rotation_third.json", q(1, 10)),
        ("circle_five_breakpoint.json", q(9, 10)),
    ];
    let mut parts = Vec::new();
    for (name, eps) in cells {
        let h = c.circle(name)?;
        let out = construct_non_iterate(&h, &eps).map_err(|e| format!("{name}: {e}"))?;
        let close = out.f.sup_distance(&h).lt_rational(&eps).map_err(|e| e.to_string())?;
        ensure(close && out.certificate.case == Case::C3, || format!("{name}: contract fails"))?;
        parts.push(format!("{name} eps {eps}: C3 at {}", out.trace.x0));
    }
    Ok(parts.join("; "))
}

fn anchor_interval_density(c: &Corpus) -> Check {
    let cells = [
        (PlMap::identity(), "identity", q(1, 2)),
        (c.interval("f1.json")?, "f1", q(1, 10)),
        (PlMap::constant(q(1, 2)), "constant 1/2", q(1, 10)),
    ];
    let mut parts = Vec::new();
    for (h, name, eps) in cells {
        let out = construct_non_iterate_interval(&h, &eps).map_err(|e| format!("{name}: {e}"))?;
        ensure(out.f.sup_distance(&h) < eps && out.certificate.case == Case::C3, || format!("{name}: contract fails"))?;
        parts.push(format!("{name} eps {eps}: C3 at {}", out.x0));
    }
    Ok(parts.join("; "))
}

/// Random maps on at most six points: every certificate must survive the
/// exhaustive solver for orders 2 and 3.
fn anchor_soundness_sample(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut certified = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let f = Endofunction::new((0..n).map(|_| rng.gen_range(0..n)).collect()).expect("entries in range");
        if certify_finite(&f).certificate().is_none() {
            continue;
        }
        certified += 1;
        for order in [2, 3] {
            let r = find_root(&RootQuery::new(f.clone(), order)).map_err(|e| e.to_string())?;
            ensure(r.status == RootStatus::None, || {
                format!("certified map {:?} has a root of order {order}", f.table())
            })?;
        }
    }
    Ok(format!("seed {seed}: {certified} certificates of 500 maps, none contradicted"))
}

pub fn missing_files(dir: &Path) -> Vec<&'static str> {
    CORPUS_FILES.iter().copied().filter(|f| !dir.join(f).is_file()).collect()
}

pub fn run(dir: &Path, seed: u64) -> Result<Vec<AnchorResult>, InputError> {
    let missing = missing_files(dir);
    if !missing.is_empty() {
        return Err(InputError::Invalid(format!("corpus {} lacks {}", dir.display(), missing.join(", "))));
    }
    let c = Corpus { dir: dir.to_path_buf() };
    type Anchor<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);
    let anchors: Vec<Anchor<'_>> = vec![
        ("f1: C3 at 3/4", Box::new(|| anchor_f1(&c))),
        ("f2: C3 at 1/4", Box::new(|| anchor_f2(&c))),
        ("remark2: fixed point blocks the criterion", Box::new(|| anchor_remark2(&c))),
        ("remark3: large other fiber blocks the criterion", Box::new(|| anchor_remark3(&c))),
        ("remark4: square root on rays", Box::new(|| anchor_remark4(&c))),
        ("remark4 sharpness: 8 = 2^3", Box::new(|| anchor_sharpness(&c))),
        ("six-point C1 instance", Box::new(|| anchor_six_point(&c))),
        ("ex4: measure analogue fails", Box::new(anchor_ex4)),
        ("density on the circle", Box::new(|| anchor_circle_density(&c))),
        ("density on the interval", Box::new(|| anchor_interval_density(&c))),
        ("certifier soundness sample", Box::new(move || anchor_soundness_sample(seed))),
    ];
    Ok(anchors
        .into_iter()
        .map(|(name, check)| {
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
                .unwrap_or_else(|_| Err("anchor panicked".to_string()));
            match outcome {
                Ok(detail) => AnchorResult { name, pass: true, detail },
                Err(detail) => AnchorResult { name, pass: false, detail },
            }
        })
        .collect())
}
