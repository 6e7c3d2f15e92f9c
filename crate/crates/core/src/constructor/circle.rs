use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certifier::{certify_profiled, Case, NonRootCertificate};
use crate::circle::{AdmissibleCircleMap, Angle, Arc, CirclePartition, ComparableReal, ConstantArc};
use crate::scalar::{min_of, ExactScalar};
use crate::{CircleAngle, CircleMap, Rational};

use super::{check_epsilon, dyadic_floor, require_all, Check, ConstructError};

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Everything the construction chose, plus the audit of every condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub epsilon: Rational,
    /// Largest angular slope of `h`.
    #[serde(with = "crate::scalar::serde_scalar")]
    pub lambda: Rational,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub delta: Rational,
    /// Number of partition points.
    pub k: usize,
    #[serde(rename = "P")]
    pub partition: Vec<CircleAngle>,
    #[serde(rename = "W")]
    pub images: Vec<CircleAngle>,
    /// Grid step used when perturbing `h(z_j)` into `w_j`.
    #[serde(with = "crate::scalar::serde_scalar")]
    pub image_step: Rational,
    pub f0: CircleMap,
    pub a: CircleAngle,
    /// Index of the image arc `f₀(J_i)` whose interior holds `J`.
    pub range_arc: usize,
    pub r: usize,
    pub r_prime: usize,
    /// Half-length of `J`.
    #[serde(with = "crate::scalar::serde_scalar")]
    pub eta: Rational,
    #[serde(rename = "J")]
    pub j_arc: Arc<Rational>,
    #[serde(rename = "K")]
    pub k_arc: Arc<Rational>,
    /// The value of `f` on `K`.
    pub x0: CircleAngle,
    /// The other end of `f₀(K)`.
    pub x1: CircleAngle,
    /// `true` when the counterclockwise start of `f₀(K)` was fixed by `f₀`
    /// and the other end was used instead.
    pub swapped: bool,
    #[serde(rename = "Q")]
    pub refined: Vec<CircleAngle>,
    pub f: CircleMap,
    pub checks: Vec<Check>,
}

/// Output of [`construct_non_iterate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleConstruction {
    pub f: CircleMap,
    pub trace: ConstructionTrace,
    pub certificate: NonRootCertificate<CircleAngle>,
}

/// A `δ ∈ (0, 1/4)` such that chordal `|z − z'| < δ` forces `|h(z) − h(z')| < ε/10`.
///
/// With angular distances `d ≤ 1/2`, `4d ≤ 2 sin(πd) ≤ 2πd < 44d/7`, and `h`
/// is `Λ`-Lipschitz in angle. So `|z − z'| < δ` gives `d < δ/4`, the image
/// angle is below `Λδ/4`, and the image chord below `11Λδ/7 ≤ ε/10` once
/// `δ ≤ 7ε/(110Λ)`. The result is a power of two capped at `1/5`.
pub fn continuity_delta(h: &CircleMap, eps: &Rational) -> Result<Rational, ConstructError> {
    check_epsilon(eps)?;
    let lambda = h.max_slope();
    let cap = q(1, 5);
    if lambda.is_zero() {
        return Ok(cap);
    }
    let bound = q(7, 110) * eps / lambda;
    Ok(min_of(&cap, &dyadic_floor(&bound).1))
}

/// Smallest power of two `k ≥ 4` with `2π/k < δ/2`, via `π < 22/7`.
fn partition_size(delta: &Rational) -> usize {
    let need = q(88, 7) / delta;
    let mut k = 4usize;
    while Rational::from_int(k as i64) <= need {
        k *= 2;
    }
    k
}

/// `w_j` near `h(z_j)`, distinct, with `w_j ≠ z_j`. Angular error below
/// `7ε/880` keeps the chord below `ε/20`.
fn choose_images(
    h: &CircleMap,
    p: &CirclePartition<Rational>,
    eps: &Rational,
) -> Result<(Vec<CircleAngle>, Rational), ConstructError> {
    let theta = q(7, 880) * eps;
    let (m0, _) = dyadic_floor(&(theta.clone() / Rational::from_int(4)));
    for level in m0..m0 + 32 {
        let step = Rational::dyadic(level);
        let offsets: Vec<Rational> = [0i64, 1, -1, 2, -2, 3, -3]
            .iter()
            .map(|&m| Rational::from_int(m) * step.clone())
            .filter(|o| o.clone().abs() < theta)
            .collect();
        let mut used: HashSet<CircleAngle> = HashSet::new();
        let mut out = Vec::with_capacity(p.len());
        for z in p.points() {
            let hz = h.eval(z);
            let pick =
                offsets.iter().map(|o| Angle::wrap(hz.t().clone() + o.clone())).find(|w| w != z && !used.contains(w));
            match pick {
                Some(w) => {
                    used.insert(w.clone());
                    out.push(w);
                }
                None => break,
            }
        }
        if out.len() == p.len() {
            return Ok((out, step));
        }
    }
    Err(ConstructError::SearchExhausted {
        step: "choose images w_j",
        detail: "no admissible perturbation on 32 grid levels".into(),
    })
}

/// Index of an image arc whose interior holds `z`.
fn interior_range_arc(f0: &CircleMap, z: &CircleAngle) -> Option<usize> {
    (0..f0.arc_count()).find(|&j| f0.image_arc(j).is_some_and(|a| a.contains_in_interior(z)))
}

const CENTER_BUDGET: usize = 1 << 20;

/// A dyadic point `a` off the partition, inside the interior of the range,
/// with `f₀(a) ≠ a` and `f₀(a)` off the partition.
fn choose_center(f0: &CircleMap) -> Result<(CircleAngle, usize), ConstructError> {
    let p = f0.partition();
    let mut examined = 0usize;
    for level in 1u32..63 {
        let den = 1i64 << level;
        for i in (1..den).step_by(2) {
            examined += 1;
            if examined > CENTER_BUDGET {
                break;
            }
            let a = Angle::wrap(q(i, den));
            if p.contains_point(&a) {
                continue;
            }
            let fa = f0.eval(&a);
            if fa == a || p.contains_point(&fa) {
                continue;
            }
            if let Some(j) = interior_range_arc(f0, &a) {
                return Ok((a, j));
            }
        }
    }
    Err(ConstructError::SearchExhausted { step: "choose a", detail: format!("examined {examined} dyadic points") })
}

/// Conditions (a) to (e) for a candidate arc `J`, with the indices `r`, `r'`.
/// With `lazy`, the preimage in (e) is only computed once (a) to (d) hold.
fn arc_conditions(f0: &CircleMap, j_arc: &Arc<Rational>, range_arc: usize, lazy: bool) -> (Vec<Check>, usize, usize) {
    let p = f0.partition();
    let mut checks = Vec::new();
    let in_range = f0.image_arc(range_arc).is_some_and(|a| a.contains_arc_in_interior(j_arc));
    checks.push(Check::new("(a) J inside the interior of R(f0)", in_range, format!("image arc {range_arc}")));
    let r = p.locate(&j_arc.start);
    checks.push(Check::new(
        "(b) J inside the open arc J_r",
        p.arc(r).contains_arc_in_interior(j_arc),
        format!("r = {r}"),
    ));
    let image = f0.image_of_subarc(j_arc).ok().flatten();
    let r_prime = image.as_ref().map_or(0, |im| p.locate(&im.start));
    let c_holds = image.as_ref().is_some_and(|im| p.arc(r_prime).contains_arc_in_interior(im));
    checks.push(Check::new("(c) f0(J) inside the open arc J_r'", c_holds, format!("r' = {r_prime}")));
    let d_holds = image.as_ref().is_some_and(|im| !im.meets(j_arc));
    checks.push(Check::new(
        "(d) f0(J) and J are disjoint",
        d_holds,
        image.as_ref().map_or_else(|| "f0 is constant on J".to_string(), |im| format!("f0(J) = {im}")),
    ));
    if lazy && checks.iter().any(|c| !c.holds) {
        checks.push(Check::new("(e) f0^-1(J) and J are disjoint", false, "not evaluated".to_string()));
        return (checks, r, r_prime);
    }
    let pre = f0.preimage_arc(j_arc);
    let e_holds = j_arc.to_set().components().iter().all(|c| pre.is_disjoint_from(c));
    checks.push(Check::new("(e) f0^-1(J) and J are disjoint", e_holds, format!("f0^-1(J) = {pre}")));
    (checks, r, r_prime)
}

fn choose_j(
    f0: &CircleMap,
    a: &CircleAngle,
    range_arc: usize,
) -> Result<(Rational, Arc<Rational>, usize, usize), ConstructError> {
    for e in 3u32..120 {
        let eta = Rational::dyadic(e);
        let j_arc = Arc::around(a, &eta)?;
        let (checks, r, r_prime) = arc_conditions(f0, &j_arc, range_arc, true);
        if checks.iter().all(|c| c.holds) {
            return Ok((eta, j_arc, r, r_prime));
        }
    }
    Err(ConstructError::SearchExhausted { step: "choose J", detail: format!("no arc around {a} satisfies (a)-(e)") })
}

/// Runs the construction for an admissible circle map `h` and `ε ∈ (0,1)`.
pub fn construct_non_iterate(h: &CircleMap, eps: &Rational) -> Result<CircleConstruction, ConstructError> {
    check_epsilon(eps)?;
    let lambda = h.max_slope();
    let delta = continuity_delta(h, eps)?;
    let k = partition_size(&delta);
    let p = CirclePartition::uniform(k)?;
    let (images, image_step) = choose_images(h, &p, eps)?;
    let f0 = AdmissibleCircleMap::from_partition(p.clone(), images.clone())?;

    let (a, range_arc) = choose_center(&f0)?;
    let (eta, j_arc, r, r_prime) = choose_j(&f0, &a, range_arc)?;
    let k_arc = Arc::around(&a, &(eta.clone() / Rational::from_int(2)))?;
    let f0k = f0
        .image_of_subarc(&k_arc)?
        .ok_or_else(|| ConstructError::SearchExhausted { step: "choose K", detail: "f0 is constant on K".into() })?;
    let (mut x0, mut x1) = (f0k.start, f0k.end);
    let mut swapped = false;
    if f0.eval(&x0) == x0 {
        std::mem::swap(&mut x0, &mut x1);
        swapped = true;
    }

    let refined = p.refine(&[j_arc.start.clone(), k_arc.start.clone(), k_arc.end.clone(), j_arc.end.clone()])?;
    let f_images = refined
        .points()
        .iter()
        .map(|z| if *z == k_arc.start || *z == k_arc.end { x0.clone() } else { f0.eval(z) })
        .collect();
    let f = AdmissibleCircleMap::from_partition(refined.clone(), f_images)?;

    let mut trace = ConstructionTrace {
        epsilon: eps.clone(),
        lambda,
        delta,
        k,
        partition: p.points().to_vec(),
        images,
        image_step,
        f0,
        a,
        range_arc,
        r,
        r_prime,
        eta,
        j_arc,
        k_arc,
        x0,
        x1,
        swapped,
        refined: refined.points().to_vec(),
        f: f.clone(),
        checks: Vec::new(),
    };
    let (checks, certificate) = audit_circle(h, &trace);
    trace.checks = checks;
    require_all(&trace.checks)?;
    let certificate = certificate.ok_or_else(|| ConstructError::CheckFailed {
        name: "certificate".into(),
        detail: "no certificate produced".into(),
    })?;
    Ok(CircleConstruction { f, trace, certificate })
}

fn chord_lt(d: &Rational, bound: &Rational) -> (bool, String) {
    let c = ComparableReal::chordal(d);
    match c.lt_rational(bound) {
        Ok(holds) => (holds, format!("{c} vs {bound}")),
        Err(e) => (false, e.to_string()),
    }
}

/// Recomputes every condition of the construction from the trace alone.
/// Returns the checks and, when the last one holds, the certificate.
pub fn audit_circle(h: &CircleMap, t: &ConstructionTrace) -> (Vec<Check>, Option<NonRootCertificate<CircleAngle>>) {
    let eps = &t.epsilon;
    let mut checks = Vec::new();
    let mut push = |name: &str, holds: bool, detail: String| checks.push(Check::new(name, holds, detail));

    push("0 < epsilon < 1", eps.is_positive() && *eps < Rational::one(), eps.to_string());
    push("0 < delta < 1/4", t.delta.is_positive() && t.delta < q(1, 4), t.delta.to_string());
    let delta_ok = t.lambda.is_zero() || t.delta <= q(7, 110) * eps / t.lambda.clone();
    push("delta <= 7 epsilon / (110 lambda)", delta_ok && t.lambda == h.max_slope(), format!("lambda = {}", t.lambda));

    let p = CirclePartition::new(t.partition.clone());
    let Ok(p) = p else {
        push("P is a partition", false, "invalid partition".into());
        return (checks, None);
    };
    push("P has k points", p.len() == t.k && t.k >= 3, format!("k = {}", t.k));
    let (holds, detail) = chord_lt(&p.mesh(), &(t.delta.clone() / Rational::from_int(2)));
    push("|z_{j+1} - z_j| < delta/2", holds, detail);

    let k = p.len();
    let worst_h = (0..k).map(|j| h.eval(&p.points()[j]).distance(&t.images[j])).max().unwrap_or_else(Rational::zero);
    let (holds, detail) = chord_lt(&worst_h, &(eps.clone() / Rational::from_int(20)));
    push("|h(z_j) - w_j| < epsilon/20", holds, detail);
    push("w_j != z_j", (0..k).all(|j| t.images[j] != p.points()[j]), String::new());
    let distinct: HashSet<&CircleAngle> = t.images.iter().collect();
    push("w_j distinct", distinct.len() == k, format!("{} distinct of {k}", distinct.len()));
    let worst_step = (0..k).map(|j| t.images[j].distance(&t.images[(j + 1) % k])).max().unwrap_or_else(Rational::zero);
    let (holds, detail) = chord_lt(&worst_step, &(eps.clone() / Rational::from_int(5)));
    push("|w_{j+1} - w_j| < epsilon/5", holds, detail);

    let e = |n: i64, d: i64| eps.clone() * q(n, d);
    push("epsilon/20 + epsilon/10 + epsilon/20 = epsilon/5", e(1, 20) + e(1, 10) + e(1, 20) == e(1, 5), String::new());
    push("epsilon/5 + epsilon/20 + epsilon/10 < epsilon/2", e(1, 5) + e(1, 20) + e(1, 10) < e(1, 2), String::new());
    push("epsilon/5 + epsilon/2 < 4 epsilon/5", e(1, 5) + e(1, 2) < e(4, 5), String::new());

    let f0 = &t.f0;
    push(
        "f0 is supported on P with values W",
        f0.partition() == &p && f0.images() == t.images.as_slice(),
        String::new(),
    );
    push("(i) f0 is injective on every J_j", (0..k).all(|j| !f0.is_constant_arc(j)), String::new());
    let identity_arc = (0..k).find(|&j| f0.images()[j] == p.points()[j] && *f0.delta(j) == p.arc(j).length());
    push("(ii) f0 is not the identity on any J_j", identity_arc.is_none(), format!("{identity_arc:?}"));
    let (holds, detail) = chord_lt(&f0.sup_angular_distance(h), &e(1, 2));
    push("rho(f0, h) < epsilon/2", holds, detail);

    push("f0(a) != a", f0.eval(&t.a) != t.a, format!("a = {}, f0(a) = {}", t.a, f0.eval(&t.a)));
    push("a in J", t.j_arc.contains_in_interior(&t.a), String::new());
    let (arc_checks, r, r_prime) = arc_conditions(f0, &t.j_arc, t.range_arc, false);
    push("r and r' match", r == t.r && r_prime == t.r_prime, format!("r = {r}, r' = {r_prime}"));
    checks.extend(arc_checks);
    let mut push = |name: &str, holds: bool, detail: String| checks.push(Check::new(name, holds, detail));

    push("K inside the interior of J", t.j_arc.contains_arc_in_interior(&t.k_arc), t.k_arc.to_string());
    let f0k = f0.image_of_subarc(&t.k_arc).ok().flatten();
    let ends_match = f0k.as_ref().is_some_and(|im| {
        let pair = if t.swapped { (&t.x1, &t.x0) } else { (&t.x0, &t.x1) };
        (&im.start, &im.end) == pair
    });
    push("f0(K) = [x0, x1] with x0 != x1", ends_match && t.x0 != t.x1, format!("{f0k:?}"));
    push("f0(x0) != x0", f0.eval(&t.x0) != t.x0, format!("f0(x0) = {}", f0.eval(&t.x0)));

    let expected_q =
        p.refine(&[t.j_arc.start.clone(), t.k_arc.start.clone(), t.k_arc.end.clone(), t.j_arc.end.clone()]);
    let q_ok = expected_q.as_ref().is_ok_and(|qp| qp.points() == t.refined.as_slice() && qp.len() == k + 4);
    push("Q = P with u0, y0, y1, u1 added", q_ok, format!("{} points", t.refined.len()));
    let f = &t.f;
    let values_ok = f.partition().points() == t.refined.as_slice()
        && f.partition().points().iter().zip(f.images()).all(|(z, w)| {
            if *z == t.k_arc.start || *z == t.k_arc.end {
                *w == t.x0
            } else {
                *w == f0.eval(z)
            }
        });
    push("f(Q) = f0(Q) except f(y0) = f(y1) = x0", values_ok, String::new());
    push("(f) f = f0 outside J", f.agrees_outside(f0, &t.j_arc), String::new());
    let expected_const =
        vec![ConstantArc { start: t.k_arc.start.clone(), end: t.k_arc.end.clone(), value: t.x0.clone() }];
    push(
        "f is constant x0 on K and nowhere else",
        f.constant_arcs() == expected_const,
        format!("{:?}", f.constant_arcs().len()),
    );
    push("f(x0) != x0", f.eval(&t.x0) != t.x0, format!("f(x0) = {}", f.eval(&t.x0)));
    let sup_f = f.sup_angular_distance(h);
    let (holds, detail) = chord_lt(&sup_f, &e(4, 5));
    push("rho(f, h) < 4 epsilon/5", holds, detail);
    let (holds, detail) = chord_lt(&sup_f, eps);
    push("rho(f, h) < epsilon", holds, detail);

    let certificate = match certify_profiled([f.fiber_profile(&t.x0)]) {
        Ok(c) => c.certificate().cloned(),
        Err(_) => None,
    };
    let c3 = certificate.as_ref().is_some_and(|c| c.case == Case::C3 && c.x0 == t.x0 && c.is_consistent());
    push(
        "C3 certificate at x0",
        c3,
        certificate.as_ref().map_or_else(|| "no certificate".into(), |c| format!("{:?}", c.evidence)),
    );
    (checks, certificate.filter(|_| c3))
}
