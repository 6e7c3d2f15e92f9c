use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certifier::{Case, Certification, NonRootCertificate};
use crate::pl_interval::Piece;
use crate::scalar::{Exact, ExactScalar};
use crate::sets::Interval;
use crate::{PlMap, Rational};

use super::{check_epsilon, dyadic_floor, require_all, Check, ConstructError};

/// Output of [`construct_non_iterate_interval`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalConstruction {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub epsilon: Rational,
    /// Number of grid cells of the interpolant `f0`.
    pub grid: usize,
    pub f0: PlMap,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub a: Rational,
    #[serde(rename = "J")]
    pub j: Interval<Rational>,
    #[serde(rename = "K")]
    pub k: Interval<Rational>,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub x0: Rational,
    pub f: PlMap,
    pub certificate: NonRootCertificate<Exact<Rational>>,
    pub checks: Vec<Check>,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn continuity_breaks(h: &PlMap) -> Option<Rational> {
    h.pieces().windows(2).find(|w| w[0].apply(&w[0].hi) != w[1].apply(&w[1].lo)).map(|w| w[0].hi.clone())
}

fn segment(lo: Rational, hi: Rational, lo_closed: bool, ylo: Rational, yhi: Rational) -> Piece<Rational> {
    let a = (yhi - ylo.clone()) / (hi.clone() - lo.clone());
    let b = ylo - a.clone() * lo.clone();
    Piece::new(Interval::new(lo, hi, lo_closed, true), a, b)
}

/// Continuous interpolant through `(x_i, v_i)`.
fn interpolate(xs: &[Rational], vs: &[Rational]) -> PlMap {
    let pieces = (0..xs.len() - 1)
        .map(|i| segment(xs[i].clone(), xs[i + 1].clone(), i == 0, vs[i].clone(), vs[i + 1].clone()))
        .collect();
    PlMap::new(pieces).expect("grid interpolant partitions [0,1]")
}

/// Values `h(x_i)` nudged by multiples of `step` so consecutive values differ
/// and every value stays in `[0,1]`.
fn perturbed_values(h: &PlMap, xs: &[Rational], step: &Rational) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let hx = h.eval(x).expect("grid lies in [0,1]");
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let v = [sign, -sign, 2 * sign, -2 * sign]
            .iter()
            .map(|&m| hx.clone() + Rational::from_int(m) * step.clone())
            .find(|v| !v.is_negative() && *v <= Rational::one() && out.last() != Some(v))
            .expect("one of four nudges stays in [0,1] and differs from the previous value");
        out.push(v);
    }
    out
}

fn in_open_image(f0: &PlMap, y: &Rational) -> bool {
    f0.pieces().iter().any(|p| {
        let im = p.image();
        im.lo < *y && *y < im.hi
    })
}

/// Builds `f` from `f0` by flattening `K` to `x0` inside `J`.
fn flatten(f0: &PlMap, j: &Interval<Rational>, k: &Interval<Rational>, x0: &Rational) -> PlMap {
    let mut pieces: Vec<Piece<Rational>> = Vec::new();
    for p in f0.pieces() {
        let dom = p.domain();
        match dom.intersect(j) {
            None => pieces.push(p.clone()),
            Some(_) => {
                if dom.lo < j.lo {
                    pieces.push(Piece::new(
                        Interval::new(dom.lo.clone(), j.lo.clone(), dom.lo_closed, false),
                        p.a.clone(),
                        p.b.clone(),
                    ));
                }
                let (fu0, fu1) = (p.apply(&j.lo), p.apply(&j.hi));
                pieces.push(segment(j.lo.clone(), k.lo.clone(), true, fu0, x0.clone()));
                pieces.push(Piece::new(
                    Interval::new(k.lo.clone(), k.hi.clone(), false, true),
                    Rational::zero(),
                    x0.clone(),
                ));
                pieces.push(segment(k.hi.clone(), j.hi.clone(), false, x0.clone(), fu1));
                if j.hi < dom.hi {
                    pieces.push(Piece::new(
                        Interval::new(j.hi.clone(), dom.hi.clone(), false, dom.hi_closed),
                        p.a.clone(),
                        p.b.clone(),
                    ));
                }
            }
        }
    }
    PlMap::new(pieces).expect("flattening keeps a partition of [0,1]")
}

/// The interval analogue of the circle construction. The output is accepted
/// only if the certifier, run afterwards on `f`, returns a C3 certificate.
pub fn construct_non_iterate_interval(h: &PlMap, eps: &Rational) -> Result<IntervalConstruction, ConstructError> {
    check_epsilon(eps)?;
    if let Some(at) = continuity_breaks(h) {
        return Err(ConstructError::Discontinuous { at: at.to_string() });
    }
    let (_, step) = dyadic_floor(&(eps.clone() / Rational::from_int(8)));
    let half_eps = eps.clone() / Rational::from_int(2);

    let mut attempt = None;
    for level in 2u32..=16 {
        let n = 1i64 << level;
        let xs: Vec<Rational> = (0..=n).map(|i| q(i, n)).collect();
        let vs = perturbed_values(h, &xs, &step);
        let f0 = interpolate(&xs, &vs);
        if f0.sup_distance(h) < half_eps {
            attempt = Some((n, xs, f0));
            break;
        }
    }
    let (n, xs, f0) = attempt.ok_or(ConstructError::SearchExhausted {
        step: "interpolate h",
        detail: "no grid up to 2^16 cells is within epsilon/2".into(),
    })?;

    let on_grid = |y: &Rational| xs.binary_search(y).is_ok();
    for level in (n.trailing_zeros() + 1)..40 {
        let den = 1i64 << level;
        for i in (1..den).step_by(2) {
            let a = q(i, den);
            let fa = f0.eval(&a).expect("a in [0,1]");
            if fa == a || on_grid(&a) || on_grid(&fa) || !in_open_image(&f0, &a) {
                continue;
            }
            if let Some(done) = try_center(h, eps, n as usize, &f0, &a) {
                return Ok(done);
            }
        }
    }
    Err(ConstructError::SearchExhausted { step: "choose J and K", detail: "no centre on the dyadic grid works".into() })
}

fn try_center(h: &PlMap, eps: &Rational, grid: usize, f0: &PlMap, a: &Rational) -> Option<IntervalConstruction> {
    let cell = f0.piece_at(a).ok()?.domain();
    for e in 2u32..100 {
        let eta = Rational::dyadic(e);
        let j = Interval::closed(a.clone() - eta.clone(), a.clone() + eta.clone());
        if !(cell.lo < j.lo && j.hi < cell.hi) {
            continue;
        }
        let piece = f0.piece_at(a).ok()?;
        let (fl, fh) = (piece.apply(&j.lo), piece.apply(&j.hi));
        let fj = if fl <= fh { Interval::closed(fl, fh) } else { Interval::closed(fh, fl) };
        if fj.intersect(&j).is_some() {
            continue;
        }
        let pre = f0.preimage_set(&crate::sets::CardinalSet::interval(j.clone()));
        if !pre.is_disjoint_from(&j) {
            continue;
        }
        let in_range = f0.pieces().iter().any(|p| {
            let im = p.image();
            im.lo < j.lo && j.hi < im.hi
        });
        if !in_range {
            continue;
        }
        let half = eta.clone() / Rational::from_int(2);
        let k = Interval::closed(a.clone() - half.clone(), a.clone() + half);
        let (y0, y1) = (piece.apply(&k.lo), piece.apply(&k.hi));
        let x0 = [y0, y1].into_iter().find(|x| f0.eval(x).ok().as_ref() != Some(x))?;
        let f = flatten(f0, &j, &k, &x0);
        let sup_f = f.sup_distance(h);
        let checks = vec![
            Check::new(
                "rho(f0, h) < epsilon/2",
                f0.sup_distance(h) < eps.clone() / Rational::from_int(2),
                String::new(),
            ),
            Check::new("f(J) and J are disjoint", fj.intersect(&j).is_none(), format!("f0(J) = {fj}")),
            Check::new("f0^-1(J) and J are disjoint", pre.is_disjoint_from(&j), pre.to_string()),
            Check::new("f = x0 on K", k.lo <= k.hi && f.eval(a).ok() == Some(x0.clone()), String::new()),
            Check::new("f(x0) != x0", f.eval(&x0).ok() != Some(x0.clone()), String::new()),
            Check::new("rho(f, h) < epsilon", sup_f < *eps, format!("{sup_f}")),
        ];
        if require_all(&checks).is_err() {
            continue;
        }
        let cert = match f.certify() {
            Ok(Certification::Certified(c)) if c.case == Case::C3 && c.is_consistent() => c,
            _ => continue,
        };
        let mut checks = checks;
        checks.push(Check::new("post-hoc C3 certificate", true, format!("x0 = {}", cert.x0)));
        return Some(IntervalConstruction {
            epsilon: eps.clone(),
            grid,
            f0: f0.clone(),
            a: a.clone(),
            j,
            k,
            x0,
            f,
            certificate: cert.map_point(Exact),
            checks,
        });
    }
    None
}
