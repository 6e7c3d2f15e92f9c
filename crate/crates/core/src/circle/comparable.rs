//! Chordal distances `2·sin(π·d)` for rational `d`, compared exactly against
//! rationals by interval arithmetic at increasing precision.
//!
//! Enclosures use dyadic rationals rounded outward after every operation.
//! π comes from Machin's formula and `sin`/`cos` from their Taylor series;
//! all three series alternate with decreasing terms on the ranges used, so
//! the first omitted term bounds the tail.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::scalar::ExactScalar;

use super::Angle;

pub const START_BITS: u32 = 64;
pub const MAX_BITS: u32 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot decide 2·sin(π·{d}) against {q} at {bits} bits")]
pub struct Indeterminate {
    pub d: String,
    pub q: String,
    pub bits: u32,
}

/// The real number `2·sin(π·d)` for an angular distance `d ∈ [0, 1/2]`.
///
/// Ordering between two values is exact and cheap, since the map is
/// increasing in `d`; comparison against a rational goes through
/// [`ComparableReal::cmp_rational`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComparableReal {
    d: BigRational,
}

impl ComparableReal {
    /// `2·sin(π·d)` after reducing `d` to the angular distance in `[0, 1/2]`.
    pub fn chordal(d: &BigRational) -> Self {
        let r = d - d.floor();
        let back = BigRational::one() - &r;
        ComparableReal { d: if r <= back { r } else { back } }
    }

    pub fn zero() -> Self {
        Self::chordal(&BigRational::zero())
    }

    pub fn angular(&self) -> &BigRational {
        &self.d
    }

    /// The rational value when there is one. By Niven's theorem `2·sin(πd)`
    /// is rational for rational `d ∈ [0, 1/2]` only at `d = 0, 1/6, 1/2`.
    pub fn exact_value(&self) -> Option<BigRational> {
        let six = BigRational::new(BigInt::one(), BigInt::from(6));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if self.d.is_zero() {
            Some(BigRational::zero())
        } else if self.d == six {
            Some(BigRational::one())
        } else if self.d == half {
            Some(BigRational::from_integer(BigInt::from(2)))
        } else {
            None
        }
    }

    /// Rational enclosure `[lo, hi]` with width roughly `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        if let Some(v) = self.exact_value() {
            return (v.clone(), v);
        }
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        let (pl, ph) = pi_enclosure(bits);
        let w = bits + 16;
        let (lo, hi) = if self.d <= quarter {
            let xl = round_down(&(&pl * &self.d), w);
            let xh = round_up(&(&ph * &self.d), w);
            sin_enclosure(&xl, &xh, w)
        } else {
            let e = BigRational::new(BigInt::one(), BigInt::from(2)) - &self.d;
            let xl = round_down(&(&pl * &e), w);
            let xh = round_up(&(&ph * &e), w);
            // cos decreases on [0, π/4]
            cos_enclosure(&xl, &xh, w)
        };
        let two = BigRational::from_integer(BigInt::from(2));
        let lo = (lo * &two).max(BigRational::zero());
        let hi = (hi * &two).min(two);
        (lo, hi)
    }

    /// Exact comparison with a rational, refining from 64 to 4096 bits.
    pub fn cmp_rational(&self, q: &BigRational) -> Result<Ordering, Indeterminate> {
        if let Some(v) = self.exact_value() {
            return Ok(v.cmp(q));
        }
        if let Some(o) = self.quick_cmp(q) {
            return Ok(o);
        }
        let mut bits = START_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if hi < *q {
                return Ok(Ordering::Less);
            }
            if lo > *q {
                return Ok(Ordering::Greater);
            }
            if bits >= MAX_BITS {
                return Err(Indeterminate { d: self.d.to_string(), q: q.to_string(), bits });
            }
            bits *= 2;
        }
    }

    /// Cheap decision from `2x - x^3/3 <= 2 sin x <= 2x` at `x = πd`, with
    /// 333/106 < π < 355/113. Most mesh-size comparisons end here.
    fn quick_cmp(&self, q: &BigRational) -> Option<Ordering> {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let upper = r(710, 113) * &self.d;
        if upper < *q {
            return Some(Ordering::Less);
        }
        let x = r(333, 106) * &self.d;
        let lower = &x * r(2, 1) - &upper * &upper * &upper / r(24, 1);
        (lower > *q).then_some(Ordering::Greater)
    }

    pub fn lt_rational(&self, q: &BigRational) -> Result<bool, Indeterminate> {
        self.cmp_rational(q).map(|o| o == Ordering::Less)
    }

    pub fn approx(&self) -> f64 {
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        2.0 * (std::f64::consts::PI * d).sin()
    }
}

impl fmt::Display for ComparableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "2·sin(π·{}) ≈ {:.12}", self.d, self.approx()),
        }
    }
}

impl Serialize for ComparableReal {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Repr {
            angular: String,
            exact: Option<String>,
            approx: f64,
        }
        Repr { angular: self.d.to_string(), exact: self.exact_value().map(|v| v.to_string()), approx: self.approx() }
            .serialize(ser)
    }
}

/// `|z − w|` for points of the unit circle.
pub fn chordal_distance<S: ExactScalar>(z: &Angle<S>, w: &Angle<S>) -> ComparableReal {
    ComparableReal::chordal(&z.distance(w).to_big_rational())
}

fn scale(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let s = scale(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let s = scale(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

fn pi_cache() -> &'static Mutex<HashMap<u32, (BigRational, BigRational)>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigRational, BigRational)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `[lo, hi] ∋ π`, memoized per precision.
pub fn pi_enclosure(bits: u32) -> (BigRational, BigRational) {
    if let Some(v) = pi_cache().lock().expect("pi cache poisoned").get(&bits) {
        return v.clone();
    }
    let w = bits + 16;
    let (a5l, a5h) = atan_inv(5, w);
    let (a239l, a239h) = atan_inv(239, w);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let lo = &sixteen * a5l - &four * a239h;
    let hi = &sixteen * a5h - &four * a239l;
    let v = (round_down(&lo, w), round_up(&hi, w));
    pi_cache().lock().expect("pi cache poisoned").insert(bits, v.clone());
    v
}

/// `[lo, hi] ∋ atan(1/k)` for an integer `k ≥ 2`.
fn atan_inv(k: u64, bits: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), scale(bits));
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = k.clone();
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    let mut n: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * n + 1) * &power);
        if term < eps && n > 0 {
            lo -= &term;
            hi += &term;
            return (lo, hi);
        }
        if n.is_multiple_of(2) {
            lo += round_down(&term, bits);
            hi += round_up(&term, bits);
        } else {
            lo -= round_up(&term, bits);
            hi -= round_down(&term, bits);
        }
        power *= &k2;
        n += 1;
    }
}

/// Sums an alternating series whose `n`-th term is `t_{n-1}·x²/den(n)`,
/// evaluated over `x ∈ [xl, xh]` with `0 ≤ xl`.
fn alternating(
    first: (BigRational, BigRational),
    xl: &BigRational,
    xh: &BigRational,
    den: impl Fn(u64) -> u64,
    bits: u32,
) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), scale(bits));
    let x2l = round_down(&(xl * xl), bits);
    let x2h = round_up(&(xh * xh), bits);
    let (mut tl, mut th) = first;
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    let mut n: u64 = 0;
    loop {
        if n.is_multiple_of(2) {
            lo += &tl;
            hi += &th;
        } else {
            lo -= &th;
            hi -= &tl;
        }
        n += 1;
        let d = BigRational::from_integer(BigInt::from(den(n)));
        tl = round_down(&(&tl * &x2l / &d), bits);
        th = round_up(&(&th * &x2h / &d), bits);
        if th <= eps {
            lo -= &th;
            hi += &th;
            return (lo, hi);
        }
    }
}

fn sin_enclosure(xl: &BigRational, xh: &BigRational, bits: u32) -> (BigRational, BigRational) {
    alternating((xl.clone(), xh.clone()), xl, xh, |n| (2 * n) * (2 * n + 1), bits)
}

/// Enclosure of `cos(x)` for `x ∈ [xl, xh] ⊂ [0, π/4]`, using that cos decreases there.
fn cos_enclosure(xl: &BigRational, xh: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let one = (BigRational::one(), BigRational::one());
    let (lo_at_xh, _) = alternating(one.clone(), xh, xh, |n| (2 * n - 1) * (2 * n), bits);
    let (_, hi_at_xl) = alternating(one, xl, xl, |n| (2 * n - 1) * (2 * n), bits);
    (lo_at_xh, hi_at_xl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pi_enclosure_is_tight_and_correct() {
        let (lo, hi) = pi_enclosure(64);
        assert!(lo < hi);
        assert!(lo > q(314159265358979, 100000000000000));
        assert!(hi < q(314159265358980, 100000000000000));
        assert!(&hi - &lo < BigRational::new(BigInt::one(), BigInt::one() << 60));
    }

    #[test]
    fn special_values_are_exact() {
        assert_eq!(ComparableReal::chordal(&q(0, 1)).exact_value(), Some(q(0, 1)));
        assert_eq!(ComparableReal::chordal(&q(1, 6)).exact_value(), Some(q(1, 1)));
        assert_eq!(ComparableReal::chordal(&q(5, 6)).exact_value(), Some(q(1, 1)));
        assert_eq!(ComparableReal::chordal(&q(1, 2)).exact_value(), Some(q(2, 1)));
        assert_eq!(ComparableReal::chordal(&q(1, 6)).cmp_rational(&q(1, 1)), Ok(Ordering::Equal));
    }

    #[test]
    fn enclosures_bracket_f64_values() {
        for (n, d) in [(1, 7), (1, 5), (1, 4), (2, 7), (1, 3), (9, 20), (1, 1000)] {
            let c = ComparableReal::chordal(&q(n, d));
            let (lo, hi) = c.enclosure(64);
            let v = c.approx();
            assert!(lo.to_f64().unwrap() <= v + 1e-15 && v - 1e-15 <= hi.to_f64().unwrap(), "{n}/{d}");
            assert!((&hi - &lo).to_f64().unwrap() < 1e-15);
        }
    }

    #[test]
    fn close_comparisons_refine() {
        // 2 sin(π/4) = √2
        let c = ComparableReal::chordal(&q(1, 4));
        let below = q(14142135623730950, 10000000000000000);
        let above = q(14142135623730951, 10000000000000000);
        assert_eq!(c.cmp_rational(&below), Ok(Ordering::Greater));
        assert_eq!(c.cmp_rational(&above), Ok(Ordering::Less));
    }

    #[test]
    fn ordering_follows_angular_distance() {
        assert!(ComparableReal::chordal(&q(1, 10)) < ComparableReal::chordal(&q(1, 5)));
        assert_eq!(ComparableReal::chordal(&q(9, 10)), ComparableReal::chordal(&q(1, 10)));
    }
}
