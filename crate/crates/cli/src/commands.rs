use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use noniterate::certifier::{certify_finite, Certification};
use noniterate::constructor::{construct_non_iterate, construct_non_iterate_interval, ConstructError};
use noniterate::endo::EndoFile;
use noniterate::root_solver::{find_root, RootError, RootQuery, RootStatus};
use noniterate::scalar::Exact;
use noniterate::symbolic::Materialized;
use noniterate::{CircleMap, PlMap, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, InputError, MapFile};
use crate::plot;
use crate::{Exit, Outcome};

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output types serialize")
}

fn input_error(e: InputError) -> Outcome {
    Outcome::error(Exit::Input, e.to_string())
}

fn describe_certification<P: Serialize + std::fmt::Display + Clone>(c: &Certification<P>) -> (Exit, Value, String) {
    match c {
        Certification::Certified(cert) => {
            let e = &cert.evidence;
            let text = format!(
                "certified ({}) at x0 = {}: f(x0) != x0, #f^-1(x0) = {}, #f^-2(x0) = {}, sup #f^-1(x) over x != x0 = {}\nscope: {}",
                cert.case, cert.x0, e.fiber1, e.fiber2, e.max_other_fiber, cert.scope
            );
            (Exit::Definitive, json!({ "certificate": to_value(cert) }), text)
        }
        Certification::Abstained(a) => {
            let mut text = format!("no certificate: {}", a.reason.describe());
            if let Some(p) = &a.closest {
                let _ = write!(
                    text,
                    "\nclosest candidate {}: #f^-2 = {}, N = {}{}",
                    p.point,
                    p.fiber2,
                    p.max_other_fiber,
                    if a.boundary { " (#f^-2 = N^3 exactly)" } else { "" }
                );
            }
            let value = json!({
                "certificate": null,
                "reason": to_value(&a.reason),
                "reason_text": a.reason.describe(),
                "boundary": a.boundary,
                "closest": to_value(&a.closest),
            });
            (Exit::Abstain, value, text)
        }
    }
}

fn truncation_note(m: &Option<Materialized>, top: i64, json: &mut Value, text: &mut String) {
    if let Some(m) = m {
        if !m.clamped.is_empty() {
            let names: Vec<String> = m.clamped.iter().map(ToString::to_string).collect();
            json["truncation"] = json!({ "top": top, "clamped": names });
            let _ = write!(text, "\nrays cut off at index {top}; images of {} clamped", names.join(", "));
        }
    }
}

pub fn certify(path: &Path, top: i64) -> Outcome {
    let (f, mat) = match input::load_finite(path, top) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let cert = certify_finite(&f.map).map_point(|i| f.label(i));
    let (exit, mut json, mut text) = describe_certification(&cert);
    truncation_note(&mat, top, &mut json, &mut text);
    Outcome { exit, json, text }
}

pub fn certify_pl(path: &Path) -> Outcome {
    match input::load(path) {
        Ok(MapFile::Interval(f)) => certify_interval(&f),
        Ok(MapFile::Circle(f)) => certify_circle(&f),
        Ok(_) => Outcome::error(Exit::Input, format!("{} is not a piecewise-linear map", path.display())),
        Err(e) => input_error(e),
    }
}

fn certify_interval(f: &PlMap) -> Outcome {
    let cert = match f.certify() {
        Ok(c) => c,
        Err(e) => return Outcome::error(Exit::Input, e.to_string()),
    };
    let x0 = cert.certificate().map(|c| c.x0.clone());
    let (exit, mut json, mut text) = describe_certification(&cert.map_point(Exact));
    if let Some(x0) = x0 {
        let (f1, f2) = (f.preimage_point(&x0), f.preimage2_point(&x0));
        json["fiber1_set"] = json!(f1.to_string());
        json["fiber2_set"] = json!(f2.to_string());
        let _ = write!(text, "\nf^-1(x0) = {f1}\nf^-2(x0) = {f2}");
    }
    Outcome { exit, json, text }
}

fn certify_circle(f: &CircleMap) -> Outcome {
    let cert = match f.certify() {
        Ok(c) => c,
        Err(e) => return Outcome::error(Exit::Input, e.to_string()),
    };
    let x0 = cert.certificate().map(|c| c.x0.clone());
    let (exit, mut json, mut text) = describe_certification(&cert);
    if let Some(x0) = x0 {
        let (f1, f2) = (f.preimage_point(&x0), f.preimage2_point(&x0));
        json["fiber1_set"] = json!(f1.to_string());
        json["fiber2_set"] = json!(f2.to_string());
        let _ = write!(text, "\nf^-1(x0) = {f1}\nf^-2(x0) = {f2}");
    }
    Outcome { exit, json, text }
}

pub fn find(path: &Path, order: u32, budget: u64, all: bool, top: i64) -> Outcome {
    let (f, mat) = match input::load_finite(path, top) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let mut q = RootQuery::new(f.map.clone(), order).with_budget(budget);
    if all {
        q = q.count_all();
    }
    let (exit, mut json, mut text) = match find_root(&q) {
        Ok(r) => {
            let witness = r.witness.as_ref().map(|g| {
                let mut file = EndoFile::from(g);
                file.labels = f.labels.clone();
                file
            });
            let mut text = match r.status {
                RootStatus::Found => format!("found a root of order {order}"),
                RootStatus::None => format!("no root of order {order} (exhaustive, {} nodes)", r.explored),
            };
            if let Some(g) = &r.witness {
                let pairs: Vec<String> =
                    (0..g.len()).map(|i| format!("{} -> {}", f.label(i), f.label(g.apply(i)))).collect();
                let _ = write!(text, "\ng: {}", pairs.join(", "));
            }
            if let Some(c) = r.count {
                let _ = write!(text, "\n{c} roots in total");
            }
            let json = json!({
                "status": to_value(&r.status),
                "order": order,
                "witness": to_value(&witness),
                "explored": r.explored,
                "count": r.count,
            });
            (Exit::Definitive, json, text)
        }
        Err(RootError::BudgetExceeded { explored, budget }) => (
            Exit::Budget,
            json!({ "status": "budget_exceeded", "explored": explored, "budget": budget }),
            format!("budget of {budget} nodes exceeded after {explored}"),
        ),
        Err(e) => return Outcome::error(Exit::Input, e.to_string()),
    };
    truncation_note(&mat, top, &mut json, &mut text);
    Outcome { exit, json, text }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Domain {
    Circle,
    Interval,
}

fn construct_error(e: ConstructError) -> Outcome {
    let exit = match e {
        ConstructError::EpsilonOutOfRange(_) | ConstructError::Discontinuous { .. } => Exit::Input,
        _ => Exit::Abstain,
    };
    Outcome::error(exit, e.to_string())
}

fn write_trace<T: Serialize>(path: Option<&Path>, trace: &T) -> Result<(), Outcome> {
    let Some(path) = path else { return Ok(()) };
    let text = serde_json::to_string_pretty(trace).expect("trace serializes");
    fs::write(path, text).map_err(|e| Outcome::error(Exit::Input, format!("cannot write {}: {e}", path.display())))
}

pub fn construct(path: &Path, epsilon: &str, domain: Option<Domain>, trace: Option<&Path>) -> Outcome {
    let eps = match input::parse_rational(epsilon) {
        Ok(e) => e,
        Err(e) => return input_error(e),
    };
    let map = match input::load(path) {
        Ok(m) => m,
        Err(e) => return input_error(e),
    };
    match (map, domain) {
        (MapFile::Circle(h), None | Some(Domain::Circle)) => construct_circle(&h, &eps, trace),
        (MapFile::Interval(h), None | Some(Domain::Interval)) => construct_interval(&h, &eps, trace),
        (_, d) => Outcome::error(Exit::Input, format!("{} does not hold a {d:?} map", path.display())),
    }
}

fn construct_circle(h: &CircleMap, eps: &Rational, trace: Option<&Path>) -> Outcome {
    let out = match construct_non_iterate(h, eps) {
        Ok(o) => o,
        Err(e) => return construct_error(e),
    };
    if let Err(o) = write_trace(trace, &out.trace) {
        return o;
    }
    let sup = out.f.sup_distance(h);
    let t = &out.trace;
    let text = format!(
        "constructed f with rho(f, h) = {sup} < {eps}\npartition of {} points refined to {}; J = {}, K = {}, x0 = {}\n{} checks hold; certificate {} at x0",
        t.k,
        t.refined.len(),
        t.j_arc,
        t.k_arc,
        t.x0,
        t.checks.len(),
        out.certificate.case
    );
    let json = json!({
        "domain": "circle",
        "epsilon": eps.to_string(),
        "f": to_value(&out.f),
        "sup_distance": to_value(&sup),
        "certificate": to_value(&out.certificate),
        "checks": to_value(&t.checks),
    });
    Outcome { exit: Exit::Definitive, json, text }
}

fn construct_interval(h: &PlMap, eps: &Rational, trace: Option<&Path>) -> Outcome {
    let out = match construct_non_iterate_interval(h, eps) {
        Ok(o) => o,
        Err(e) => return construct_error(e),
    };
    if let Err(o) = write_trace(trace, &out) {
        return o;
    }
    let sup = out.f.sup_distance(h);
    let text = format!(
        "constructed f with rho(f, h) = {sup} < {eps}\ngrid of {} cells; J = {}, K = {}, x0 = {}\ncertificate {} at x0",
        out.grid, out.j, out.k, out.x0, out.certificate.case
    );
    let json = json!({
        "domain": "interval",
        "epsilon": eps.to_string(),
        "f": to_value(&out.f),
        "sup_distance": sup.to_string(),
        "certificate": to_value(&out.certificate),
        "checks": to_value(&out.checks),
    });
    Outcome { exit: Exit::Definitive, json, text }
}

pub fn export_plot(path: &Path, output: Option<&Path>) -> Outcome {
    let svg = match input::load(path) {
        Ok(MapFile::Interval(f)) => plot::interval_svg(&f),
        Ok(MapFile::Circle(f)) => plot::circle_svg(&f),
        Ok(_) => return Outcome::error(Exit::Input, format!("{} is not a piecewise-linear map", path.display())),
        Err(e) => return input_error(e),
    };
    match output {
        Some(out) => match fs::write(out, &svg) {
            Ok(()) => Outcome {
                exit: Exit::Definitive,
                json: json!({ "written": out.display().to_string(), "bytes": svg.len() }),
                text: format!("wrote {}", out.display()),
            },
            Err(e) => Outcome::error(Exit::Input, format!("cannot write {}: {e}", out.display())),
        },
        None => Outcome { exit: Exit::Definitive, json: json!({ "svg": svg.clone() }), text: svg },
    }
}
