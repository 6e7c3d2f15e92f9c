use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{parse_scalar, ExactScalar};
use crate::sets::{CardinalSet, Interval};

use super::CircleError;

/// A point `e^{2πit}` of the unit circle, stored as `t ∈ [0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle<S: ExactScalar>(S);

impl<S: ExactScalar> Angle<S> {
    pub fn new(t: S) -> Result<Self, CircleError> {
        if t.is_negative() || t >= S::one() {
            return Err(CircleError::AngleOutOfRange { t: t.to_string() });
        }
        Ok(Angle(t))
    }

    /// Reduces any real `t` modulo 1.
    pub fn wrap(t: S) -> Self {
        Angle(t.fract_part())
    }

    pub fn zero() -> Self {
        Angle(S::zero())
    }

    pub fn t(&self) -> &S {
        &self.0
    }

    pub fn into_inner(self) -> S {
        self.0
    }

    /// Counterclockwise distance from `self` to `other`, in `[0,1)`.
    pub fn ccw_to(&self, other: &Angle<S>) -> S {
        (other.0.clone() - self.0.clone()).fract_part()
    }

    /// `min` of the two one-way distances, in `[0, 1/2]`.
    pub fn distance(&self, other: &Angle<S>) -> S {
        let d = self.ccw_to(other);
        let back = S::one() - d.clone();
        if d <= back {
            d
        } else {
            back
        }
    }

    pub fn rotate(&self, by: &S) -> Angle<S> {
        Angle::wrap(self.0.clone() + by.clone())
    }
}

impl<S: ExactScalar> fmt::Display for Angle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<S: ExactScalar> Serialize for Angle<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.collect_str(&self.0)
    }
}

impl<'de, S: ExactScalar> Deserialize<'de> for Angle<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = String::deserialize(de)?;
        let t: S = parse_scalar(&raw).ok_or_else(|| D::Error::custom(format!("invalid rational `{raw}`")))?;
        Angle::new(t).map_err(D::Error::custom)
    }
}

/// `true` iff `z0, z1, z2` are met in this order going counterclockwise from `z0`.
pub fn cyclic_order<S: ExactScalar>(z0: &Angle<S>, z1: &Angle<S>, z2: &Angle<S>) -> Result<bool, CircleError> {
    if z0 == z1 || z1 == z2 || z0 == z2 {
        return Err(CircleError::NotDistinct);
    }
    Ok(z0.ccw_to(z1) < z0.ccw_to(z2))
}

/// Signed lifted step from `w1` to `w2` along the minor arc, in `(-1/2, 1/2)`.
/// Zero for equal points; an error for antipodal ones.
pub fn minor_displacement<S: ExactScalar>(w1: &Angle<S>, w2: &Angle<S>) -> Result<S, CircleError> {
    let d = w1.ccw_to(w2);
    let half = S::half();
    match d.cmp(&half) {
        std::cmp::Ordering::Less => Ok(d),
        std::cmp::Ordering::Equal => Err(CircleError::Antipodal { w1: w1.to_string(), w2: w2.to_string() }),
        std::cmp::Ordering::Greater => Ok(d - S::one()),
    }
}

/// The closed arc from `start` counterclockwise to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Arc<S: ExactScalar> {
    pub start: Angle<S>,
    pub end: Angle<S>,
}

impl<S: ExactScalar> Arc<S> {
    pub fn new(start: Angle<S>, end: Angle<S>) -> Result<Self, CircleError> {
        if start == end {
            return Err(CircleError::DegenerateArc { at: start.to_string() });
        }
        Ok(Arc { start, end })
    }

    /// Arc of angular length `2·radius` centred at `center`. Needs `0 < radius < 1/2`.
    pub fn around(center: &Angle<S>, radius: &S) -> Result<Self, CircleError> {
        Arc::new(center.rotate(&-radius.clone()), center.rotate(radius))
    }

    pub fn length(&self) -> S {
        self.start.ccw_to(&self.end)
    }

    pub fn offset(&self, z: &Angle<S>) -> S {
        self.start.ccw_to(z)
    }

    pub fn contains(&self, z: &Angle<S>) -> bool {
        self.offset(z) <= self.length()
    }

    pub fn contains_in_interior(&self, z: &Angle<S>) -> bool {
        let o = self.offset(z);
        o.is_positive() && o < self.length()
    }

    /// `other ⊆ self`.
    pub fn contains_arc(&self, other: &Arc<S>) -> bool {
        self.contains(&other.start) && self.offset(&other.start) + other.length() <= self.length()
    }

    /// `other ⊆ interior(self)`.
    pub fn contains_arc_in_interior(&self, other: &Arc<S>) -> bool {
        self.contains_in_interior(&other.start) && self.offset(&other.start) + other.length() < self.length()
    }

    /// The closed arcs share at least one point.
    pub fn meets(&self, other: &Arc<S>) -> bool {
        self.contains(&other.start) || other.contains(&self.start)
    }

    /// The point at parameter `alpha ∈ [0,1]` along the arc.
    pub fn at(&self, alpha: &S) -> Angle<S> {
        self.start.rotate(&(alpha.clone() * self.length()))
    }

    pub fn midpoint(&self) -> Angle<S> {
        self.at(&S::half())
    }

    /// The closed arc as a subset of `[0,1)`.
    pub fn to_set(&self) -> CardinalSet<S> {
        let lo = self.start.t().clone();
        let hi = lo.clone() + self.length();
        CardinalSet::from_parts(std::iter::empty(), split_lifted(&Interval::closed(lo, hi)))
    }
}

impl<S: ExactScalar> fmt::Display for Arc<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} → {}]", self.start, self.end)
    }
}

/// Cuts an interval of the real line lying in `[-1, 2)` into pieces of `[0,1)`.
pub(crate) fn split_lifted<S: ExactScalar>(iv: &Interval<S>) -> Vec<Interval<S>> {
    let mut out = Vec::new();
    for m in [-1i64, 0, 1] {
        let shift = S::from_int(m);
        let window = Interval::new(shift.clone(), shift.clone() + S::one(), true, false);
        if let Some(part) = iv.intersect(&window) {
            out.push(part.translate(&-shift));
        }
    }
    out
}

/// Orientation of an arc map relative to the domain arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserve,
    Reverse,
}

/// The affine map from the arc `[t1, t2]` to an arc starting at `s1`,
/// `t1 + α·L ↦ s1 + α·Δ (mod 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcAffine<S: ExactScalar> {
    pub domain: Arc<S>,
    pub s1: Angle<S>,
    /// Lifted displacement of the image from `s1` to `s2`.
    pub delta: S,
}

/// Affine map of `domain` onto the arc from `s1` to `s2`, counterclockwise
/// (`Preserve`) or clockwise (`Reverse`). Endpoints go to `s1` and `s2`.
pub fn affine_on_arc<S: ExactScalar>(
    domain: Arc<S>,
    s1: Angle<S>,
    s2: Angle<S>,
    orientation: Orientation,
) -> ArcAffine<S> {
    let ccw = s1.ccw_to(&s2);
    let delta = match orientation {
        Orientation::Preserve => ccw,
        Orientation::Reverse => ccw - S::one(),
    };
    ArcAffine { domain, s1, delta }
}

impl<S: ExactScalar> ArcAffine<S> {
    /// Lifted image value at arc parameter `alpha`.
    pub fn lift_at(&self, alpha: &S) -> S {
        self.s1.t().clone() + alpha.clone() * self.delta.clone()
    }

    pub fn at_alpha(&self, alpha: &S) -> Angle<S> {
        Angle::wrap(self.lift_at(alpha))
    }

    /// Evaluates at a point of the domain arc.
    pub fn eval(&self, z: &Angle<S>) -> Angle<S> {
        let alpha = self.domain.offset(z) / self.domain.length();
        self.at_alpha(&alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn a(n: i64, d: i64) -> Angle<BigRational> {
        Angle::new(BigRational::ratio(n, d)).unwrap()
    }

    #[test]
    fn angle_range_is_enforced() {
        assert!(Angle::new(BigRational::ratio(1, 1)).is_err());
        assert!(Angle::new(BigRational::ratio(-1, 3)).is_err());
        assert_eq!(Angle::wrap(BigRational::ratio(-1, 3)), a(2, 3));
    }

    #[test]
    fn arc_containment_across_zero() {
        let big = Arc::new(a(7, 8), a(1, 4)).unwrap();
        let small = Arc::new(a(15, 16), a(1, 8)).unwrap();
        assert!(big.contains_arc_in_interior(&small));
        assert!(!small.contains_arc(&big));
        assert!(big.contains(&a(0, 1)));
        assert!(!big.contains(&a(1, 2)));
        let far = Arc::new(a(1, 3), a(1, 2)).unwrap();
        assert!(!big.meets(&far));
        assert!(big.meets(&Arc::new(a(1, 4), a(1, 3)).unwrap()));
        assert_eq!(big.to_set().cardinality(), crate::Cardinal::Continuum);
        assert!(big.to_set().contains(&BigRational::ratio(0, 1)));
    }

    #[test]
    fn degenerate_arc_is_rejected() {
        assert!(Arc::new(a(1, 3), a(1, 3)).is_err());
    }
}
