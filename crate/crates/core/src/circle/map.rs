use serde::{Deserialize, Serialize};

use crate::certifier::{certify_profiled, Cardinal, Certification, FiberProfile, ProfileError};
use crate::scalar::{max_of, ExactScalar};
use crate::sets::{CardinalSet, CoverCounts, Interval, OtherFibers};

use super::angle::{minor_displacement, split_lifted, Angle, Arc, ArcAffine};
use super::comparable::ComparableReal;
use super::CircleError;

/// Points `z_0 ≺ z_1 ≺ … ≺ z_{k-1}` of the circle, stored in increasing `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CirclePartition<S: ExactScalar> {
    points: Vec<Angle<S>>,
}

impl<S: ExactScalar> CirclePartition<S> {
    /// Accepts any cyclic rotation of an increasing sequence of at least two points.
    pub fn new(points: Vec<Angle<S>>) -> Result<Self, CircleError> {
        Self::with_rotation(points).map(|(p, _)| p)
    }

    /// Also returns how far the input was rotated to start at its smallest point.
    fn with_rotation(mut points: Vec<Angle<S>>) -> Result<(Self, usize), CircleError> {
        let k = points.len();
        if k < 2 {
            return Err(CircleError::TooFewPoints { k });
        }
        let mut turns = S::zero();
        for j in 0..k {
            let (a, b) = (&points[j], &points[(j + 1) % k]);
            if a == b {
                return Err(CircleError::NotDistinct);
            }
            turns = turns + a.ccw_to(b);
        }
        if !turns.is_one() {
            return Err(CircleError::NotCyclicallySorted);
        }
        let start = (0..k).min_by(|&i, &j| points[i].cmp(&points[j])).expect("k >= 2");
        points.rotate_left(start);
        Ok((CirclePartition { points }, start))
    }

    /// `t_j = j/k`.
    pub fn uniform(k: usize) -> Result<Self, CircleError> {
        let k_i = i64::try_from(k).map_err(|_| CircleError::TooFewPoints { k })?;
        Self::new((0..k_i).map(|j| Angle::wrap(S::ratio(j, k_i))).collect())
    }

    pub fn points(&self) -> &[Angle<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `J_j = [z_j, z_{j+1}]`, indices mod `k`.
    pub fn arc(&self, j: usize) -> Arc<S> {
        let k = self.len();
        Arc { start: self.points[j % k].clone(), end: self.points[(j + 1) % k].clone() }
    }

    /// Index of the arc `[z_j, z_{j+1})` containing `z`.
    pub fn locate(&self, z: &Angle<S>) -> usize {
        let i = self.points.partition_point(|p| p <= z);
        if i == 0 {
            self.len() - 1
        } else {
            i - 1
        }
    }

    pub fn contains_point(&self, z: &Angle<S>) -> bool {
        self.points.binary_search(z).is_ok()
    }

    /// Largest angular gap between consecutive points.
    pub fn mesh(&self) -> S {
        (0..self.len()).map(|j| self.arc(j).length()).max().expect("k >= 2")
    }

    /// Adds arc midpoints until every arc is shorter than `1/2`.
    pub fn split_long_arcs(mut self) -> Self {
        loop {
            let long: Vec<Angle<S>> = (0..self.len())
                .map(|j| self.arc(j))
                .filter(|a| a.length() >= S::half())
                .map(|a| a.midpoint())
                .collect();
            if long.is_empty() {
                return self;
            }
            self = self.refine(&long).expect("midpoints are new points");
        }
    }

    /// Union with extra points.
    pub fn refine(&self, extra: &[Angle<S>]) -> Result<Self, CircleError> {
        let mut pts: Vec<Angle<S>> = self.points.iter().chain(extra.iter()).cloned().collect();
        pts.sort();
        pts.dedup();
        Self::new(pts)
    }
}

/// A piecewise-affine circle map supported on a partition: `z_j ↦ w_j`, each arc
/// `[z_j, z_{j+1}]` sent affinely onto the minor arc between `w_j` and `w_{j+1}`.
/// Equal consecutive images make a constant arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "", try_from = "CircleFile<S>", into = "CircleFile<S>")]
pub struct AdmissibleCircleMap<S: ExactScalar> {
    partition: CirclePartition<S>,
    images: Vec<Angle<S>>,
    deltas: Vec<S>,
}

/// A constant arc as listed in the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConstantArc<S: ExactScalar> {
    pub start: Angle<S>,
    pub end: Angle<S>,
    pub value: Angle<S>,
}

/// JSON form: `{"partition": [...], "images": [...], "constant_arcs": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CircleFile<S: ExactScalar> {
    pub partition: Vec<Angle<S>>,
    pub images: Vec<Angle<S>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constant_arcs: Vec<ConstantArc<S>>,
}

impl<S: ExactScalar> TryFrom<CircleFile<S>> for AdmissibleCircleMap<S> {
    type Error = CircleError;

    fn try_from(file: CircleFile<S>) -> Result<Self, CircleError> {
        let map = AdmissibleCircleMap::new(file.partition, file.images)?;
        let derived = map.constant_arcs();
        for c in &file.constant_arcs {
            if !derived.contains(c) {
                return Err(CircleError::ConstantArcMismatch { start: c.start.to_string(), end: c.end.to_string() });
            }
        }
        Ok(map)
    }
}

impl<S: ExactScalar> From<AdmissibleCircleMap<S>> for CircleFile<S> {
    fn from(m: AdmissibleCircleMap<S>) -> Self {
        let constant_arcs = m.constant_arcs();
        CircleFile { partition: m.partition.points, images: m.images, constant_arcs }
    }
}

impl<S: ExactScalar> AdmissibleCircleMap<S> {
    pub fn new(partition: Vec<Angle<S>>, mut images: Vec<Angle<S>>) -> Result<Self, CircleError> {
        if partition.len() != images.len() {
            return Err(CircleError::LengthMismatch { points: partition.len(), images: images.len() });
        }
        let (partition, shift) = CirclePartition::with_rotation(partition)?;
        images.rotate_left(shift);
        let k = images.len();
        let mut deltas = Vec::with_capacity(k);
        for j in 0..k {
            let d = minor_displacement(&images[j], &images[(j + 1) % k])
                .map_err(|_| CircleError::AntipodalImages { arc: j })?;
            deltas.push(d);
        }
        Ok(AdmissibleCircleMap { partition, images, deltas })
    }

    pub fn from_partition(partition: CirclePartition<S>, images: Vec<Angle<S>>) -> Result<Self, CircleError> {
        Self::new(partition.points, images)
    }

    /// The identity, supported on `partition` refined until every arc is
    /// shorter than a half circle.
    pub fn identity(partition: CirclePartition<S>) -> Self {
        let partition = partition.split_long_arcs();
        let images = partition.points.clone();
        Self::from_partition(partition, images).expect("short arcs give admissible images")
    }

    /// Rotation by `r`, refined like [`Self::identity`].
    pub fn rotation(partition: CirclePartition<S>, r: &S) -> Self {
        let partition = partition.split_long_arcs();
        let images = partition.points.iter().map(|z| z.rotate(r)).collect();
        Self::from_partition(partition, images).expect("short arcs give admissible images")
    }

    pub fn partition(&self) -> &CirclePartition<S> {
        &self.partition
    }

    pub fn images(&self) -> &[Angle<S>] {
        &self.images
    }

    /// Lifted displacement of arc `j`'s image, in `(-1/2, 1/2)`.
    pub fn delta(&self, j: usize) -> &S {
        &self.deltas[j]
    }

    pub fn arc_count(&self) -> usize {
        self.images.len()
    }

    pub fn is_constant_arc(&self, j: usize) -> bool {
        self.deltas[j].is_zero()
    }

    pub fn arc_map(&self, j: usize) -> ArcAffine<S> {
        ArcAffine { domain: self.partition.arc(j), s1: self.images[j].clone(), delta: self.deltas[j].clone() }
    }

    /// The minor image arc of arc `j`, oriented counterclockwise; `None` when constant.
    pub fn image_arc(&self, j: usize) -> Option<Arc<S>> {
        let k = self.arc_count();
        let (a, b) = (self.images[j].clone(), self.images[(j + 1) % k].clone());
        match self.deltas[j].cmp(&S::zero()) {
            std::cmp::Ordering::Greater => Some(Arc { start: a, end: b }),
            std::cmp::Ordering::Less => Some(Arc { start: b, end: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn constant_arcs(&self) -> Vec<ConstantArc<S>> {
        (0..self.arc_count())
            .filter(|&j| self.is_constant_arc(j))
            .map(|j| {
                let arc = self.partition.arc(j);
                ConstantArc { start: arc.start, end: arc.end, value: self.images[j].clone() }
            })
            .collect()
    }

    /// `max |Δ_j| / |J_j|`, the angular Lipschitz constant.
    pub fn max_slope(&self) -> S {
        (0..self.arc_count()).map(|j| self.deltas[j].abs() / self.partition.arc(j).length()).max().expect("k >= 2")
    }

    pub fn eval(&self, z: &Angle<S>) -> Angle<S> {
        self.arc_map(self.partition.locate(z)).eval(z)
    }

    /// Limit of `f` at `z_j` along arc `j - 1`.
    pub fn left_limit(&self, j: usize) -> Angle<S> {
        let k = self.arc_count();
        let prev = (j + k - 1) % k;
        self.arc_map(prev).at_alpha(&S::one())
    }

    /// Lifted value and slope of `f` on the arc containing `z`, as seen from `z`:
    /// `f(z + u) ≡ value + slope·u` for small `u ≥ 0`.
    fn local_form(&self, z: &Angle<S>) -> (S, S) {
        let j = self.partition.locate(z);
        let arc = self.partition.arc(j);
        let slope = self.deltas[j].clone() / arc.length();
        let value = self.images[j].t().clone() + slope.clone() * arc.offset(z);
        (value, slope)
    }

    /// `f⁻¹(target)` for a subset of `[0,1)`.
    pub fn preimage_set(&self, target: &CardinalSet<S>) -> CardinalSet<S> {
        let comps = target.components();
        let mut parts = Vec::new();
        for j in 0..self.arc_count() {
            let arc = self.partition.arc(j);
            let len = arc.length();
            let z = arc.start.t().clone();
            let w = self.images[j].t().clone();
            let domain = Interval::new(S::zero(), len.clone(), true, false);
            if self.deltas[j].is_zero() {
                if target.contains(&w) {
                    parts.extend(split_lifted(&domain.translate(&z)));
                }
                continue;
            }
            let slope = self.deltas[j].clone() / len;
            let end = w.clone() + self.deltas[j].clone();
            let (lo, hi) = if end > w { (w.clone(), end) } else { (end, w.clone()) };
            for m in [-1i64, 0, 1] {
                // closed lifted image of arc j, moved back by m; a cheap filter
                let shift = S::from_int(m);
                let (lo_m, hi_m) = (lo.clone() - shift.clone(), hi.clone() - shift.clone());
                for c in comps.iter().filter(|c| c.lo <= hi_m && c.hi >= lo_m) {
                    let lifted = c.translate(&shift);
                    if let Some(u) = domain.intersect(&lifted.affine_preimage(&slope, &w)) {
                        parts.extend(split_lifted(&u.translate(&z)));
                    }
                }
            }
        }
        CardinalSet::from_parts(std::iter::empty(), parts)
    }

    pub fn preimage_point(&self, y: &Angle<S>) -> CardinalSet<S> {
        self.preimage_set(&CardinalSet::points([y.t().clone()]))
    }

    pub fn preimage2_point(&self, y: &Angle<S>) -> CardinalSet<S> {
        self.preimage_set(&self.preimage_point(y))
    }

    /// `f⁻¹(arc)` for a closed arc.
    pub fn preimage_arc(&self, arc: &Arc<S>) -> CardinalSet<S> {
        self.preimage_set(&arc.to_set())
    }

    /// `f(arc)` for an arc inside a single partition arc, as a closed arc or a point.
    pub fn image_of_subarc(&self, arc: &Arc<S>) -> Result<Option<Arc<S>>, CircleError> {
        let j = self.partition.locate(&arc.start);
        if !self.partition.arc(j).contains_arc(arc) {
            return Err(CircleError::SpansBreakpoint { arc: arc.to_string() });
        }
        let (a, b) = (self.eval(&arc.start), self.arc_map(j).eval(&arc.end));
        Ok(match self.deltas[j].cmp(&S::zero()) {
            std::cmp::Ordering::Greater => Some(Arc { start: a, end: b }),
            std::cmp::Ordering::Less => Some(Arc { start: b, end: a }),
            std::cmp::Ordering::Equal => None,
        })
    }

    /// `f(S¹)` as a subset of `[0,1)`.
    pub fn range(&self) -> CardinalSet<S> {
        let mut out = CardinalSet::empty();
        for j in 0..self.arc_count() {
            out = match self.image_arc(j) {
                Some(a) => out.union(&a.to_set()),
                None => out.union(&CardinalSet::points([self.images[j].t().clone()])),
            };
        }
        out
    }

    /// `sup { #f⁻¹(y) : y ≠ x0 }`.
    pub fn max_fiber_excluding(&self, x0: &Angle<S>) -> Cardinal {
        self.other_fibers().sup_excluding(x0.t())
    }

    fn other_fibers(&self) -> OtherFibers<S> {
        let mut images = Vec::new();
        for j in 0..self.arc_count() {
            let w = self.images[j].t().clone();
            let end = w.clone() + self.deltas[j].clone();
            let lifted = match self.deltas[j].cmp(&S::zero()) {
                std::cmp::Ordering::Greater => Interval::new(w, end, true, false),
                std::cmp::Ordering::Less => Interval::new(end, w, false, true),
                std::cmp::Ordering::Equal => Interval::point(w),
            };
            images.extend(split_lifted(&lifted));
        }
        let flat_values = self.constant_arcs().into_iter().map(|c| c.value.into_inner()).collect();
        OtherFibers { flat_values, counts: CoverCounts::new(&images) }
    }

    pub fn fiber_profile(&self, x0: &Angle<S>) -> FiberProfile<Angle<S>> {
        self.profile_with(x0, &self.other_fibers())
    }

    fn profile_with(&self, x0: &Angle<S>, others: &OtherFibers<S>) -> FiberProfile<Angle<S>> {
        FiberProfile {
            point: x0.clone(),
            fiber1: self.preimage_point(x0).cardinality(),
            fiber2: self.preimage2_point(x0).cardinality(),
            max_other_fiber: others.sup_excluding(x0.t()),
            not_fixed: self.eval(x0) != *x0,
        }
    }

    /// Values of constant arcs, then the images `w_j`, then the partition points.
    pub fn candidates(&self) -> Vec<Angle<S>> {
        let mut out: Vec<Angle<S>> = Vec::new();
        let consts = self.constant_arcs().into_iter().map(|c| c.value);
        for v in consts.chain(self.images.iter().cloned()).chain(self.partition.points.iter().cloned()) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn certify(&self) -> Result<Certification<Angle<S>>, ProfileError> {
        let others = self.other_fibers();
        certify_profiled(self.candidates().iter().map(|x| self.profile_with(x, &others)))
    }

    /// Cut points of the common refinement with `other`.
    fn common_cuts(&self, other: &AdmissibleCircleMap<S>) -> Vec<Angle<S>> {
        let mut cuts: Vec<Angle<S>> =
            self.partition.points.iter().chain(other.partition.points.iter()).cloned().collect();
        cuts.sort();
        cuts.dedup();
        cuts
    }

    /// `sup_z d(f(z), g(z))` in angular distance, in `[0, 1/2]`.
    ///
    /// On each arc of the common refinement the lifted difference is affine,
    /// so the supremum is at an end unless the difference crosses `1/2 mod 1`.
    pub fn sup_angular_distance(&self, other: &AdmissibleCircleMap<S>) -> S {
        let cuts = self.common_cuts(other);
        let half = S::half();
        let mut best = S::zero();
        for i in 0..cuts.len() {
            let a = &cuts[i];
            let len = a.ccw_to(&cuts[(i + 1) % cuts.len()]);
            let len = if len.is_zero() { S::one() } else { len };
            let (fv, fs) = self.local_form(a);
            let (gv, gs) = other.local_form(a);
            let d0 = fv - gv;
            let d1 = d0.clone() + (fs - gs) * len;
            let (lo, hi) = if d0 <= d1 { (d0.clone(), d1.clone()) } else { (d1.clone(), d0.clone()) };
            if (hi - half.clone()).floor() >= (lo - half.clone()).ceil() {
                return half;
            }
            for d in [d0, d1] {
                best = max_of(&best, &angular(&d));
            }
        }
        best
    }

    /// `ρ(f, g) = sup_z |f(z) − g(z)|` with the chordal metric.
    pub fn sup_distance(&self, other: &AdmissibleCircleMap<S>) -> ComparableReal {
        ComparableReal::chordal(&self.sup_angular_distance(other).to_big_rational())
    }

    /// `true` iff `f = g` at every point outside `interior(arc)`.
    pub fn agrees_outside(&self, other: &AdmissibleCircleMap<S>, arc: &Arc<S>) -> bool {
        let mut cuts = self.common_cuts(other);
        cuts.extend([arc.start.clone(), arc.end.clone()]);
        cuts.sort();
        cuts.dedup();
        for i in 0..cuts.len() {
            let a = &cuts[i];
            let b = &cuts[(i + 1) % cuts.len()];
            let piece = Arc { start: a.clone(), end: b.clone() };
            let mid = piece.midpoint();
            if arc.contains_in_interior(&mid) {
                continue;
            }
            // both maps are affine on the piece
            let (fv, fs) = self.local_form(a);
            let (gv, gs) = other.local_form(a);
            if Angle::wrap(fv) != Angle::wrap(gv) || fs != gs {
                return false;
            }
        }
        true
    }
}

fn angular<S: ExactScalar>(d: &S) -> S {
    let r = d.fract_part();
    let back = S::one() - r.clone();
    if r <= back {
        r
    } else {
        back
    }
}
