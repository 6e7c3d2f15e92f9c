//! Exact piecewise-affine self-maps of `[0,1]`.
//!
//! Pieces carry explicit open/closed flags on both ends, so discontinuous maps
//! are first-class. Every operation is exact; there is no floating point here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::{certify_profiled, Cardinal, Certification, FiberProfile, ProfileError};
use crate::scalar::{max_of, ExactScalar};
use crate::sets::{CardinalSet, CoverCounts, Interval, OtherFibers};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("a piecewise map needs at least one piece")]
    NoPieces,
    #[error("piece {index} is empty: {piece}")]
    EmptyPiece { index: usize, piece: String },
    #[error("the pieces must start with a closed end at 0, found {found}")]
    BadStart { found: String },
    #[error("the pieces must end with a closed end at 1, found {found}")]
    BadEnd { found: String },
    #[error("pieces {left} and {right} leave a gap or overlap at {at}")]
    NotAPartition { left: usize, right: usize, at: String },
    #[error("piece {index} maps {x} to {y}, outside [0,1]")]
    RangeViolation { index: usize, x: String, y: String },
    #[error("{x} is outside [0,1]")]
    OutOfDomain { x: String },
}

/// `x ↦ a·x + b` on one interval of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Piece<S: ExactScalar> {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub lo: S,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub a: S,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub b: S,
}

impl<S: ExactScalar> Piece<S> {
    pub fn new(domain: Interval<S>, a: S, b: S) -> Self {
        Piece { lo: domain.lo, hi: domain.hi, lo_closed: domain.lo_closed, hi_closed: domain.hi_closed, a, b }
    }

    pub fn domain(&self) -> Interval<S> {
        Interval::new(self.lo.clone(), self.hi.clone(), self.lo_closed, self.hi_closed)
    }

    pub fn apply(&self, x: &S) -> S {
        self.a.clone() * x.clone() + self.b.clone()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Constant on a nondegenerate interval.
    pub fn is_flat(&self) -> bool {
        self.a.is_zero() && !self.is_point()
    }

    pub fn image(&self) -> Interval<S> {
        self.domain().affine_image(&self.a, &self.b)
    }

    /// `{ x in this piece : a·x + b ∈ target }`.
    pub fn preimage_of(&self, target: &Interval<S>) -> Option<Interval<S>> {
        if self.a.is_zero() {
            target.contains(&self.b).then(|| self.domain())
        } else {
            self.domain().intersect(&target.affine_preimage(&self.a, &self.b))
        }
    }

    fn same_form(&self, other: &Piece<S>) -> bool {
        self.a == other.a && self.b == other.b
    }
}

/// A piecewise-affine map `[0,1] → [0,1]` whose pieces partition `[0,1]`.
///
/// Construction normalizes: single-point pieces are folded into a neighbour
/// that already takes the same value, and adjacent pieces with the same affine
/// form are merged. Two maps are equal iff they agree pointwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "", try_from = "PlFile<S>", into = "PlFile<S>")]
pub struct PlMapInterval<S: ExactScalar> {
    pieces: Vec<Piece<S>>,
}

/// JSON form: `{"pieces": [{"lo": "0", "hi": "1/4", "lo_closed": true, ...}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PlFile<S: ExactScalar> {
    pub pieces: Vec<Piece<S>>,
}

impl<S: ExactScalar> TryFrom<PlFile<S>> for PlMapInterval<S> {
    type Error = PlError;

    fn try_from(file: PlFile<S>) -> Result<Self, PlError> {
        PlMapInterval::new(file.pieces)
    }
}

impl<S: ExactScalar> From<PlMapInterval<S>> for PlFile<S> {
    fn from(f: PlMapInterval<S>) -> Self {
        PlFile { pieces: f.pieces }
    }
}

impl<S: ExactScalar> PlMapInterval<S> {
    pub fn new(mut pieces: Vec<Piece<S>>) -> Result<Self, PlError> {
        if pieces.is_empty() {
            return Err(PlError::NoPieces);
        }
        for (index, p) in pieces.iter().enumerate() {
            if p.domain().is_empty() {
                return Err(PlError::EmptyPiece { index, piece: p.domain().to_string() });
            }
        }
        pieces.sort_by(|p, q| p.lo.cmp(&q.lo).then(q.lo_closed.cmp(&p.lo_closed)));

        let first = &pieces[0];
        if !(first.lo.is_zero() && first.lo_closed) {
            return Err(PlError::BadStart { found: first.domain().to_string() });
        }
        let last = &pieces[pieces.len() - 1];
        if !(last.hi.is_one() && last.hi_closed) {
            return Err(PlError::BadEnd { found: last.domain().to_string() });
        }
        for i in 1..pieces.len() {
            let (l, r) = (&pieces[i - 1], &pieces[i]);
            if l.hi != r.lo || l.hi_closed == r.lo_closed {
                return Err(PlError::NotAPartition { left: i - 1, right: i, at: l.hi.to_string() });
            }
        }
        for (index, p) in pieces.iter().enumerate() {
            for x in [&p.lo, &p.hi] {
                let y = p.apply(x);
                if y.is_negative() || y > S::one() {
                    return Err(PlError::RangeViolation { index, x: x.to_string(), y: y.to_string() });
                }
            }
        }
        Ok(PlMapInterval { pieces: normalize(pieces) })
    }

    pub fn identity() -> Self {
        Self::affine(S::one(), S::zero())
    }

    /// Panics unless `0 ≤ c ≤ 1`.
    pub fn constant(c: S) -> Self {
        Self::affine(S::zero(), c)
    }

    fn affine(a: S, b: S) -> Self {
        Self::new(vec![Piece::new(Interval::closed(S::zero(), S::one()), a, b)]).expect("valid single-piece map")
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    /// Interior piece boundaries, sorted.
    pub fn breakpoints(&self) -> Vec<S> {
        let mut out: Vec<S> = self.pieces.iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).collect();
        out.sort();
        out.dedup();
        out
    }

    fn piece_index(&self, x: &S) -> usize {
        self.pieces.partition_point(|p| p.hi < *x || (p.hi == *x && !p.hi_closed))
    }

    pub fn piece_at(&self, x: &S) -> Result<&Piece<S>, PlError> {
        check_domain(x)?;
        Ok(&self.pieces[self.piece_index(x)])
    }

    pub fn eval(&self, x: &S) -> Result<S, PlError> {
        self.piece_at(x).map(|p| p.apply(x))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PlMapInterval<S>) -> PlMapInterval<S> {
        let mut out = Vec::new();
        for g in &inner.pieces {
            for f in &self.pieces {
                if let Some(dom) = g.preimage_of(&f.domain()) {
                    let a = f.a.clone() * g.a.clone();
                    let b = f.a.clone() * g.b.clone() + f.b.clone();
                    out.push(Piece::new(dom, a, b));
                }
                if g.a.is_zero() && f.domain().contains(&g.b) {
                    break;
                }
            }
        }
        PlMapInterval::new(out).expect("composition of self-maps partitions [0,1]")
    }

    /// `self^k` with `self^0` the identity.
    pub fn iterate(&self, k: u32) -> PlMapInterval<S> {
        (0..k).fold(Self::identity(), |acc, _| self.compose(&acc))
    }

    pub fn preimage_set(&self, target: &CardinalSet<S>) -> CardinalSet<S> {
        let comps = target.components();
        let mut parts = Vec::new();
        for p in &self.pieces {
            for c in &comps {
                if let Some(iv) = p.preimage_of(c) {
                    parts.push(iv);
                }
            }
        }
        CardinalSet::from_parts(std::iter::empty(), parts)
    }

    /// `f⁻¹(y)`.
    pub fn preimage_point(&self, y: &S) -> CardinalSet<S> {
        self.preimage_set(&CardinalSet::points([y.clone()]))
    }

    /// `f⁻²(y)`, the preimage of `f⁻¹(y)`.
    pub fn preimage2_point(&self, y: &S) -> CardinalSet<S> {
        self.preimage_set(&self.preimage_point(y))
    }

    /// `sup { #f⁻¹(y) : y ≠ x0 }`. Continuum iff a flat piece takes a value other than `x0`.
    pub fn max_fiber_excluding(&self, x0: &S) -> Cardinal {
        self.other_fibers().sup_excluding(x0)
    }

    fn other_fibers(&self) -> OtherFibers<S> {
        let images: Vec<Interval<S>> = self.pieces.iter().map(Piece::image).collect();
        let flat_values = self.pieces.iter().filter(|p| p.is_flat()).map(|p| p.b.clone()).collect();
        OtherFibers { flat_values, counts: CoverCounts::new(&images) }
    }

    pub fn fiber_profile(&self, x0: &S) -> Result<FiberProfile<S>, PlError> {
        self.profile_with(x0, &self.other_fibers())
    }

    fn profile_with(&self, x0: &S, others: &OtherFibers<S>) -> Result<FiberProfile<S>, PlError> {
        let fx = self.eval(x0)?;
        Ok(FiberProfile {
            point: x0.clone(),
            fiber1: self.preimage_point(x0).cardinality(),
            fiber2: self.preimage2_point(x0).cardinality(),
            max_other_fiber: others.sup_excluding(x0),
            not_fixed: fx != *x0,
        })
    }

    /// Values of flat pieces first, then the images of every piece endpoint
    /// (one-sided at open ends), then the breakpoints, without repeats.
    pub fn candidates(&self) -> Vec<S> {
        let mut out: Vec<S> = Vec::new();
        let mut push = |v: S| {
            if !out.contains(&v) {
                out.push(v);
            }
        };
        for p in self.pieces.iter().filter(|p| p.is_flat()) {
            push(p.b.clone());
        }
        for p in &self.pieces {
            push(p.apply(&p.lo));
            push(p.apply(&p.hi));
        }
        for b in self.breakpoints() {
            push(b);
        }
        out
    }

    /// Runs the certifier over [`Self::candidates`].
    pub fn certify(&self) -> Result<Certification<S>, ProfileError> {
        let others = self.other_fibers();
        let candidates = self.candidates();
        certify_profiled(candidates.iter().map(|x| self.profile_with(x, &others).expect("candidates lie in [0,1]")))
    }

    /// Exact `sup |f − g|` over `[0,1]`, taking one-sided limits at open ends.
    pub fn sup_distance(&self, other: &PlMapInterval<S>) -> S {
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort();
        cuts.dedup();
        let mut best = S::zero();
        for t in &cuts {
            let d = self.eval(t).expect("in domain") - other.eval(t).expect("in domain");
            best = max_of(&best, &d.abs());
        }
        for w in cuts.windows(2) {
            let mid = (w[0].clone() + w[1].clone()) / S::from_int(2);
            let (p, q) = (&self.pieces[self.piece_index(&mid)], &other.pieces[other.piece_index(&mid)]);
            for t in w {
                best = max_of(&best, &(p.apply(t) - q.apply(t)).abs());
            }
        }
        best
    }
}

fn check_domain<S: ExactScalar>(x: &S) -> Result<(), PlError> {
    if x.is_negative() || *x > S::one() {
        Err(PlError::OutOfDomain { x: x.to_string() })
    } else {
        Ok(())
    }
}

fn normalize<S: ExactScalar>(pieces: Vec<Piece<S>>) -> Vec<Piece<S>> {
    let mut out: Vec<Piece<S>> = Vec::with_capacity(pieces.len());
    let mut pending_point: Option<Piece<S>> = None;
    for mut p in pieces {
        if p.is_point() {
            let v = p.apply(&p.lo);
            p.a = S::zero();
            p.b = v.clone();
            if let Some(prev) = out.last_mut() {
                if !prev.is_point() && prev.apply(&p.lo) == v {
                    prev.hi_closed = true;
                    continue;
                }
            }
            pending_point = Some(p.clone());
            out.push(p);
            continue;
        }
        if let Some(pt) = pending_point.take() {
            if p.apply(&pt.lo) == pt.b {
                out.pop();
                p.lo_closed = true;
            }
        }
        if let Some(prev) = out.last_mut() {
            if prev.same_form(&p) && !prev.is_point() {
                prev.hi = p.hi;
                prev.hi_closed = p.hi_closed;
                continue;
            }
        }
        out.push(p);
    }
    out
}
