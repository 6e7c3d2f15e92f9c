//! Exact scalar abstraction.
//!
//! Every piecewise-affine computation in this crate is exact. The maps are
//! generic over [`ExactScalar`], which is implemented for `num_rational::Ratio<T>`
//! over any signed integer type that widens into `BigInt`. The crate root
//! fixes the default to `BigRational`; `Ratio<i64>` works for small inputs but
//! overflows (and panics) once denominators grow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// An ordered field with exact arithmetic and a floor operation.
pub trait ExactScalar: Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static {
    /// Builds `num / den`. Panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor(&self) -> Self;

    /// Lossless conversion into an arbitrary-precision rational.
    fn to_big_rational(&self) -> BigRational;

    fn from_int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn ceil(&self) -> Self {
        -(-self.clone()).floor()
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    fn fract_part(&self) -> Self {
        // wrapping rarely moves by more than one turn; skip the division then
        let one = Self::one();
        if self.is_negative() {
            let up = self.clone() + one;
            if !up.is_negative() {
                return up;
            }
        } else if *self < one {
            return self.clone();
        } else {
            let down = self.clone() - one.clone();
            if down < one {
                return down;
            }
        }
        self.clone() - self.floor()
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn is_integer(&self) -> bool {
        self.floor() == *self
    }

    /// `2^-exp`.
    fn dyadic(exp: u32) -> Self {
        let mut v = Self::one();
        let two = Self::from_int(2);
        for _ in 0..exp {
            v = v / two.clone();
        }
        v
    }

    fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_big_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> ExactScalar for Ratio<T>
where
    T: Clone + Integer + Signed + Hash + Debug + Display + FromStr + From<i64> + Into<BigInt> + Send + Sync + 'static,
    Ratio<T>: FromStr,
{
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(T::from(num), T::from(den))
    }

    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn to_big_rational(&self) -> BigRational {
        Ratio::new_raw(self.numer().clone().into(), self.denom().clone().into())
    }
}

/// Parses `"p/q"`, `"p"` or a decimal like `"0.25"` into an exact scalar.
pub fn parse_scalar<S: ExactScalar>(text: &str) -> Option<S> {
    let text = text.trim();
    if let Ok(v) = text.parse::<S>() {
        return Some(v);
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 18 {
        return None;
    }
    let mut value = if int_part.is_empty() { S::zero() } else { int_part.parse::<S>().ok()? };
    if !frac_part.is_empty() {
        let den = 10i64.pow(frac_part.len() as u32);
        let num: i64 = frac_part.parse().ok()?;
        value = value + S::ratio(num, den);
    }
    Some(if neg { -value } else { value })
}

/// Serde adapter that writes scalars as `"p/q"` strings.
pub mod serde_scalar {
    use super::{parse_scalar, ExactScalar};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: ExactScalar, Ser: Serializer>(v: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.collect_str(v)
    }

    pub fn deserialize<'de, S: ExactScalar, D: Deserializer<'de>>(de: D) -> Result<S, D::Error> {
        let raw = String::deserialize(de)?;
        parse_scalar(&raw).ok_or_else(|| D::Error::custom(format!("invalid rational `{raw}`")))
    }
}

/// Serde adapter for `Vec` of scalars.
pub mod serde_scalar_vec {
    use super::{parse_scalar, ExactScalar};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: ExactScalar, Ser: Serializer>(v: &[S], ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = ser.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, S: ExactScalar, D: Deserializer<'de>>(de: D) -> Result<Vec<S>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter().map(|r| parse_scalar(r).ok_or_else(|| D::Error::custom(format!("invalid rational `{r}`")))).collect()
    }
}

/// A scalar that serializes as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(bound = "", transparent)]
pub struct Exact<S: ExactScalar>(#[serde(with = "serde_scalar")] pub S);

impl<S: ExactScalar> Display for Exact<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn min_of<S: Ord + Clone>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub(crate) fn max_of<S: Ord + Clone>(a: &S, b: &S) -> S {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}
