//! Exact point sets on the line: finitely many isolated points plus finitely
//! many intervals with explicit open/closed ends. Preimages of piecewise-affine
//! maps are always of this shape.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::certifier::Cardinal;
use crate::scalar::{max_of, ExactScalar};

/// An interval `lo..hi` whose ends are individually open or closed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Interval<S: ExactScalar> {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub lo: S,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<S: ExactScalar> Interval<S> {
    pub fn new(lo: S, hi: S, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn closed(lo: S, hi: S) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: S, hi: S) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: S) -> Self {
        Self::new(x.clone(), x, true, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    /// Nonempty and not a single point.
    pub fn is_proper(&self) -> bool {
        self.lo < self.hi
    }

    pub fn contains(&self, x: &S) -> bool {
        let above = *x > self.lo || (*x == self.lo && self.lo_closed);
        let below = *x < self.hi || (*x == self.hi && self.hi_closed);
        above && below
    }

    pub fn contains_interval(&self, other: &Interval<S>) -> bool {
        if other.is_empty() {
            return true;
        }
        let lo_ok = other.lo > self.lo || (other.lo == self.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval<S>) -> Option<Interval<S>> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        let out = Interval { lo, hi, lo_closed, hi_closed };
        (!out.is_empty()).then_some(out)
    }

    /// `{ x : slope * x + intercept ∈ self }` for a nonzero slope.
    pub fn affine_preimage(&self, slope: &S, intercept: &S) -> Interval<S> {
        debug_assert!(!slope.is_zero());
        let a = (self.lo.clone() - intercept.clone()) / slope.clone();
        let b = (self.hi.clone() - intercept.clone()) / slope.clone();
        if slope.is_positive() {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    /// Image under `x ↦ slope * x + intercept`. A zero slope gives the point image.
    pub fn affine_image(&self, slope: &S, intercept: &S) -> Interval<S> {
        let a = slope.clone() * self.lo.clone() + intercept.clone();
        let b = slope.clone() * self.hi.clone() + intercept.clone();
        if slope.is_zero() {
            Interval::point(a)
        } else if slope.is_positive() {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    pub fn translate(&self, by: &S) -> Interval<S> {
        Interval::new(self.lo.clone() + by.clone(), self.hi.clone() + by.clone(), self.lo_closed, self.hi_closed)
    }

    pub fn length(&self) -> S {
        max_of(&(self.hi.clone() - self.lo.clone()), &S::zero())
    }
}

impl<S: ExactScalar> std::fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// A normalized union of isolated points and pairwise disjoint, non-touching
/// proper intervals. Two sets are equal iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CardinalSet<S: ExactScalar> {
    #[serde(with = "crate::scalar::serde_scalar_vec")]
    isolated: Vec<S>,
    intervals: Vec<Interval<S>>,
}

impl<S: ExactScalar> Default for CardinalSet<S> {
    fn default() -> Self {
        CardinalSet { isolated: Vec::new(), intervals: Vec::new() }
    }
}

impl<S: ExactScalar> CardinalSet<S> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_parts(points: impl IntoIterator<Item = S>, intervals: impl IntoIterator<Item = Interval<S>>) -> Self {
        let mut isolated: BTreeSet<S> = points.into_iter().collect();
        let mut proper = Vec::new();
        for iv in intervals {
            if iv.is_empty() {
                continue;
            }
            if iv.is_point() {
                isolated.insert(iv.lo);
            } else {
                proper.push(iv);
            }
        }
        proper.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));

        let mut merged: Vec<Interval<S>> = Vec::with_capacity(proper.len());
        for iv in proper {
            if let Some(cur) = merged.last_mut() {
                let touches =
                    iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed || isolated.contains(&iv.lo)));
                if touches {
                    match iv.hi.cmp(&cur.hi) {
                        std::cmp::Ordering::Greater => {
                            cur.hi = iv.hi;
                            cur.hi_closed = iv.hi_closed;
                        }
                        std::cmp::Ordering::Equal => cur.hi_closed |= iv.hi_closed,
                        std::cmp::Ordering::Less => {}
                    }
                    continue;
                }
            }
            merged.push(iv);
        }

        let mut kept = Vec::new();
        for p in isolated {
            let mut absorbed = false;
            for iv in merged.iter_mut() {
                if iv.contains(&p) {
                    absorbed = true;
                } else if p == iv.lo {
                    iv.lo_closed = true;
                    absorbed = true;
                } else if p == iv.hi {
                    iv.hi_closed = true;
                    absorbed = true;
                }
                if absorbed {
                    break;
                }
            }
            if !absorbed {
                kept.push(p);
            }
        }
        CardinalSet { isolated: kept, intervals: merged }
    }

    pub fn points(points: impl IntoIterator<Item = S>) -> Self {
        Self::from_parts(points, std::iter::empty())
    }

    pub fn interval(iv: Interval<S>) -> Self {
        Self::from_parts(std::iter::empty(), std::iter::once(iv))
    }

    pub fn isolated(&self) -> &[S] {
        &self.isolated
    }

    pub fn intervals(&self) -> &[Interval<S>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.isolated.is_empty() && self.intervals.is_empty()
    }

    pub fn cardinality(&self) -> Cardinal {
        if self.intervals.is_empty() {
            Cardinal::Finite(self.isolated.len() as u64)
        } else {
            Cardinal::Continuum
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        self.isolated.binary_search(x).is_ok() || self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn contains_interval(&self, other: &Interval<S>) -> bool {
        if other.is_empty() {
            return true;
        }
        if other.is_point() {
            return self.contains(&other.lo);
        }
        self.intervals.iter().any(|iv| iv.contains_interval(other))
    }

    pub fn union(&self, other: &CardinalSet<S>) -> CardinalSet<S> {
        Self::from_parts(
            self.isolated.iter().chain(other.isolated.iter()).cloned(),
            self.intervals.iter().chain(other.intervals.iter()).cloned(),
        )
    }

    /// Every component (points as degenerate intervals), in increasing order.
    pub fn components(&self) -> Vec<Interval<S>> {
        let mut out: Vec<Interval<S>> =
            self.isolated.iter().cloned().map(Interval::point).chain(self.intervals.iter().cloned()).collect();
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }

    pub fn intersect_interval(&self, iv: &Interval<S>) -> CardinalSet<S> {
        Self::from_parts(
            self.isolated.iter().filter(|p| iv.contains(p)).cloned(),
            self.intervals.iter().filter_map(|c| c.intersect(iv)),
        )
    }

    pub fn is_disjoint_from(&self, iv: &Interval<S>) -> bool {
        self.intersect_interval(iv).is_empty()
    }
}

impl<S: ExactScalar> std::fmt::Display for CardinalSet<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .components()
            .iter()
            .map(|c| if c.is_point() { format!("{{{}}}", c.lo) } else { c.to_string() })
            .collect();
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" ∪ "))
        }
    }
}

/// Supremum over `y ∉ {exclude}` of the number of intervals containing `y`.
pub fn sup_cover_count<S: ExactScalar>(intervals: &[Interval<S>], exclude: Option<&S>) -> u64 {
    CoverCounts::new(intervals).sup_excluding(exclude)
}

/// How many of a fixed family of intervals contain each point, summarized so
/// that the supremum away from any one point is a constant-time query.
///
/// Intervals may overlap and may be single points. The count is a step
/// function whose steps sit at interval endpoints, so it suffices to evaluate
/// it at each endpoint and inside each open gap between consecutive endpoints.
/// Gaps have more than one point, so excluding a point never lowers a gap's
/// contribution; only the two largest endpoint values need remembering.
#[derive(Clone, Debug)]
pub struct CoverCounts<S: ExactScalar> {
    gap_max: u64,
    top: Vec<(u64, S)>,
}

impl<S: ExactScalar> CoverCounts<S> {
    pub fn new(intervals: &[Interval<S>]) -> Self {
        let live: Vec<&Interval<S>> = intervals.iter().filter(|iv| !iv.is_empty()).collect();
        // (value, 0 = closed start / 1 = open start)
        let mut starts: Vec<(S, u8)> = live.iter().map(|iv| (iv.lo.clone(), u8::from(!iv.lo_closed))).collect();
        // (value, 0 = open end / 1 = closed end)
        let mut ends: Vec<(S, u8)> = live.iter().map(|iv| (iv.hi.clone(), u8::from(iv.hi_closed))).collect();
        starts.sort();
        ends.sort();
        let count_le = |list: &Vec<(S, u8)>, key: &(S, u8)| list.partition_point(|e| e <= key) as u64;

        let mut events: Vec<S> = live.iter().flat_map(|iv| [iv.lo.clone(), iv.hi.clone()]).collect();
        events.sort();
        events.dedup();

        let mut gap_max = 0u64;
        let mut top: Vec<(u64, S)> = Vec::with_capacity(3);
        for v in events {
            // open gap just after v (after the last endpoint it is zero)
            let key = (v.clone(), 1u8);
            gap_max = gap_max.max(count_le(&starts, &key) - count_le(&ends, &key));
            let key = (v.clone(), 0u8);
            let at = count_le(&starts, &key) - count_le(&ends, &key);
            top.push((at, v));
            top.sort_by_key(|e| std::cmp::Reverse(e.0));
            top.truncate(2);
        }
        CoverCounts { gap_max, top }
    }

    pub fn sup_excluding(&self, exclude: Option<&S>) -> u64 {
        let at = self.top.iter().find(|(_, v)| Some(v) != exclude).map_or(0, |(c, _)| *c);
        self.gap_max.max(at)
    }
}

/// `sup { #f⁻¹(y) : y ≠ x0 }` for a piecewise-affine map, precomputed from
/// its flat values and the images of its pieces.
#[derive(Clone, Debug)]
pub(crate) struct OtherFibers<S: ExactScalar> {
    pub(crate) flat_values: Vec<S>,
    pub(crate) counts: CoverCounts<S>,
}

impl<S: ExactScalar> OtherFibers<S> {
    pub(crate) fn sup_excluding(&self, x0: &S) -> Cardinal {
        if self.flat_values.iter().any(|v| v != x0) {
            return Cardinal::Continuum;
        }
        Cardinal::Finite(self.counts.sup_excluding(Some(x0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn merges_touching_and_absorbs_points() {
        let set = CardinalSet::from_parts(
            vec![q(1, 2), q(3, 4), q(9, 10)],
            vec![
                Interval::new(q(0, 1), q(1, 2), true, false),
                Interval::open(q(1, 2), q(3, 4)),
                Interval::new(q(3, 4), q(7, 8), false, false),
            ],
        );
        assert_eq!(set.intervals(), &[Interval::new(q(0, 1), q(7, 8), true, false)]);
        assert_eq!(set.isolated(), &[q(9, 10)]);
        assert_eq!(set.cardinality(), Cardinal::Continuum);
    }

    #[test]
    fn open_gap_without_point_stays_split() {
        let set = CardinalSet::from_parts(
            Vec::<BigRational>::new(),
            vec![Interval::open(q(0, 1), q(1, 2)), Interval::open(q(1, 2), q(1, 1))],
        );
        assert_eq!(set.intervals().len(), 2);
        assert!(!set.contains(&q(1, 2)));
    }

    #[test]
    fn point_intervals_become_isolated() {
        let set =
            CardinalSet::from_parts(vec![q(1, 3)], vec![Interval::point(q(1, 5)), Interval::open(q(1, 1), q(1, 1))]);
        assert_eq!(set.cardinality(), Cardinal::Finite(2));
    }

    #[test]
    fn cover_count_respects_flags_and_exclusion() {
        let ivs = vec![
            Interval::closed(q(0, 1), q(1, 2)),
            Interval::new(q(1, 2), q(1, 1), false, true),
            Interval::closed(q(1, 4), q(3, 4)),
        ];
        // y in (1/4, 1/2]: first and third; y in (1/2, 3/4]: second and third
        assert_eq!(sup_cover_count(&ivs, None), 2);
        let pts = vec![Interval::point(q(1, 2)), Interval::point(q(1, 2)), Interval::closed(q(0, 1), q(1, 1))];
        assert_eq!(sup_cover_count(&pts, None), 3);
        assert_eq!(sup_cover_count(&pts, Some(&q(1, 2))), 1);
    }

    #[test]
    fn affine_preimage_flips_for_negative_slope() {
        let iv = Interval::new(q(0, 1), q(1, 2), true, false);
        let pre = iv.affine_preimage(&q(-2, 1), &q(1, 1));
        // -2x + 1 in [0, 1/2)  <=>  x in (1/4, 1/2]
        assert_eq!(pre, Interval::new(q(1, 4), q(1, 2), false, true));
    }
}
