use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certifier::{Cardinal, FiberProfile};
use crate::endo::{Endofunction, LabeledEndofunction};

use super::SymbolicError;

/// Finite integer interval `[lo, hi]` or ray `{j : j ≥ from}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexSet {
    Ray { ray_from: i64 },
    Range { lo: i64, hi: i64 },
}

impl IndexSet {
    pub fn range(lo: i64, hi: i64) -> Result<Self, SymbolicError> {
        if lo > hi {
            return Err(SymbolicError::EmptyIndexSet { lo, hi });
        }
        Ok(IndexSet::Range { lo, hi })
    }

    pub fn ray(from: i64) -> Self {
        IndexSet::Ray { ray_from: from }
    }

    pub fn point(j: i64) -> Self {
        IndexSet::Range { lo: j, hi: j }
    }

    fn check(self) -> Result<Self, SymbolicError> {
        match self {
            IndexSet::Range { lo, hi } => IndexSet::range(lo, hi),
            ray => Ok(ray),
        }
    }

    pub fn lo(self) -> i64 {
        match self {
            IndexSet::Ray { ray_from } => ray_from,
            IndexSet::Range { lo, .. } => lo,
        }
    }

    /// `None` for a ray.
    pub fn hi(self) -> Option<i64> {
        match self {
            IndexSet::Ray { .. } => None,
            IndexSet::Range { hi, .. } => Some(hi),
        }
    }

    pub fn contains(self, j: i64) -> bool {
        j >= self.lo() && self.hi().is_none_or(|h| j <= h)
    }

    pub fn cardinal(self) -> Cardinal {
        match self {
            IndexSet::Ray { .. } => Cardinal::Aleph0,
            IndexSet::Range { lo, hi } => Cardinal::Finite((hi - lo + 1) as u64),
        }
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.lo() >= other.lo()
            && match (self.hi(), other.hi()) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a <= b,
            }
    }

    pub fn intersect(self, other: IndexSet) -> Option<IndexSet> {
        let lo = self.lo().max(other.lo());
        match (self.hi(), other.hi()) {
            (None, None) => Some(IndexSet::ray(lo)),
            (Some(h), None) | (None, Some(h)) => IndexSet::range(lo, h).ok(),
            (Some(a), Some(b)) => IndexSet::range(lo, a.min(b)).ok(),
        }
    }

    pub fn shift(self, c: i64) -> IndexSet {
        match self {
            IndexSet::Ray { ray_from } => IndexSet::ray(ray_from + c),
            IndexSet::Range { lo, hi } => IndexSet::Range { lo: lo + c, hi: hi + c },
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Ray { ray_from } => write!(f, "[{ray_from}, inf)"),
            IndexSet::Range { lo, hi } if lo == hi => write!(f, "{{{lo}}}"),
            IndexSet::Range { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub label: String,
    #[serde(flatten)]
    pub indices: IndexSet,
}

/// Disjoint union of labelled index families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Family>", into = "Vec<Family>")]
pub struct RayDomain {
    families: Vec<Family>,
}

impl RayDomain {
    pub fn new(families: Vec<Family>) -> Result<Self, SymbolicError> {
        let mut seen = BTreeSet::new();
        for fam in &families {
            fam.indices.check()?;
            if !seen.insert(fam.label.as_str()) {
                return Err(SymbolicError::DuplicateLabel(fam.label.clone()));
            }
        }
        Ok(RayDomain { families })
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, label: &str) -> Result<&Family, SymbolicError> {
        self.families.iter().find(|f| f.label == label).ok_or_else(|| SymbolicError::UnknownFamily(label.to_string()))
    }

    pub fn contains(&self, p: &RayPoint) -> bool {
        self.family(&p.label).is_ok_and(|f| f.indices.contains(p.index))
    }

    fn position(&self, label: &str) -> usize {
        self.families.iter().position(|f| f.label == label).unwrap_or(usize::MAX)
    }
}

impl TryFrom<Vec<Family>> for RayDomain {
    type Error = SymbolicError;

    fn try_from(v: Vec<Family>) -> Result<Self, SymbolicError> {
        RayDomain::new(v)
    }
}

impl From<RayDomain> for Vec<Family> {
    fn from(d: RayDomain) -> Self {
        d.families
    }
}

/// The point `label_index`, printed as `x_-8`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RayPoint {
    pub label: String,
    pub index: i64,
}

impl RayPoint {
    pub fn new(label: &str, index: i64) -> Self {
        RayPoint { label: label.to_string(), index }
    }
}

impl fmt::Display for RayPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.label, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// `j ↦ dst_{j+c}`
    Shift { dst: String, c: i64 },
    /// every index goes to the one point `dst_j`
    Const { dst: String, j: i64 },
}

impl Action {
    fn dst(&self) -> &str {
        match self {
            Action::Shift { dst, .. } | Action::Const { dst, .. } => dst,
        }
    }

    fn apply(&self, j: i64) -> RayPoint {
        match self {
            Action::Shift { dst, c } => RayPoint::new(dst, j + c),
            Action::Const { dst, j } => RayPoint::new(dst, *j),
        }
    }

    /// Image of a guard.
    fn image(&self, guard: IndexSet) -> IndexSet {
        match self {
            Action::Shift { c, .. } => guard.shift(*c),
            Action::Const { j, .. } => IndexSet::point(*j),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Shift { dst, c } => write!(f, "j -> {dst}_(j{c:+})"),
            Action::Const { dst, j } => write!(f, "-> {dst}_{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub src: String,
    pub guard: IndexSet,
    pub action: Action,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_j, j in {}: {}", self.src, self.guard, self.action)
    }
}

/// One piece of a fiber: the points `label_j` with `j` in `indices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberPiece {
    pub label: String,
    pub indices: IndexSet,
}

/// JSON form of a [`RayMap`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayFile {
    pub families: RayDomain,
    pub rules: Vec<Rule>,
}

/// A self-map of a [`RayDomain`] given by shift and constant rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RayFile", into = "RayFile")]
pub struct RayMap {
    domain: RayDomain,
    rules: Vec<Rule>,
}

impl TryFrom<RayFile> for RayMap {
    type Error = SymbolicError;

    fn try_from(file: RayFile) -> Result<Self, SymbolicError> {
        RayMap::new(file.families, file.rules)
    }
}

impl From<RayMap> for RayFile {
    fn from(m: RayMap) -> Self {
        RayFile { families: m.domain, rules: m.rules }
    }
}

/// A finite truncation of a [`RayMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Materialized {
    pub map: LabeledEndofunction,
    pub points: Vec<RayPoint>,
    /// Points whose image lay above the cut-off and was clamped to it.
    pub clamped: Vec<RayPoint>,
}

impl Materialized {
    pub fn index_of(&self, p: &RayPoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }
}

impl RayMap {
    /// Validates that, per family, the guards tile its index set exactly and
    /// every action lands inside its target family. Rules are stored sorted by
    /// family, then guard.
    pub fn new(domain: RayDomain, mut rules: Vec<Rule>) -> Result<Self, SymbolicError> {
        for r in &mut rules {
            r.guard = r.guard.check()?;
            let fam = domain.family(&r.src)?;
            if !r.guard.is_subset(fam.indices) {
                return Err(SymbolicError::GuardOutsideFamily { label: r.src.clone(), guard: r.guard.to_string() });
            }
            let target = domain.family(r.action.dst())?;
            if !r.action.image(r.guard).is_subset(target.indices) {
                return Err(SymbolicError::ActionOutOfRange {
                    label: r.src.clone(),
                    guard: r.guard.to_string(),
                    dst: target.label.clone(),
                });
            }
        }
        rules.sort_by_key(|r| (domain.position(&r.src), r.guard.lo()));
        for fam in domain.families() {
            let mut next = Some(fam.indices.lo());
            for r in rules.iter().filter(|r| r.src == fam.label) {
                let Some(want) = next else {
                    return Err(SymbolicError::Overlap { label: fam.label.clone(), index: r.guard.lo() });
                };
                if r.guard.lo() > want {
                    return Err(SymbolicError::Gap { label: fam.label.clone(), index: want.to_string() });
                }
                if r.guard.lo() < want {
                    return Err(SymbolicError::Overlap { label: fam.label.clone(), index: r.guard.lo() });
                }
                next = r.guard.hi().map(|h| h + 1);
            }
            match (next, fam.indices.hi()) {
                (None, _) => {}
                (Some(n), Some(h)) if n == h + 1 => {}
                (Some(n), _) => return Err(SymbolicError::Gap { label: fam.label.clone(), index: n.to_string() }),
            }
        }
        Ok(RayMap { domain, rules })
    }

    pub fn domain(&self) -> &RayDomain {
        &self.domain
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The identity on `domain`.
    pub fn identity(domain: RayDomain) -> Self {
        let rules = domain
            .families()
            .iter()
            .map(|f| Rule {
                src: f.label.clone(),
                guard: f.indices,
                action: Action::Shift { dst: f.label.clone(), c: 0 },
            })
            .collect();
        RayMap::new(domain, rules).expect("identity rules tile every family")
    }

    fn rule_at(&self, p: &RayPoint) -> Result<&Rule, SymbolicError> {
        self.rules
            .iter()
            .find(|r| r.src == p.label && r.guard.contains(p.index))
            .ok_or_else(|| SymbolicError::PointOutsideDomain(p.to_string()))
    }

    pub fn eval(&self, p: &RayPoint) -> Result<RayPoint, SymbolicError> {
        Ok(self.rule_at(p)?.action.apply(p.index))
    }

    /// `self ∘ inner`, with guards of `inner` split along the guards of `self`.
    pub fn compose(&self, inner: &RayMap) -> Result<RayMap, SymbolicError> {
        if self.domain != inner.domain {
            return Err(SymbolicError::DomainMismatch);
        }
        let mut out = Vec::new();
        for r in &inner.rules {
            match &r.action {
                Action::Const { dst, j } => {
                    let action = self.rule_at(&RayPoint::new(dst, *j))?.action.clone();
                    let action = match action {
                        Action::Shift { dst, c } => Action::Const { dst, j: j + c },
                        constant => constant,
                    };
                    out.push(Rule { src: r.src.clone(), guard: r.guard, action });
                }
                Action::Shift { dst, c } => {
                    let image = r.guard.shift(*c);
                    for outer in self.rules.iter().filter(|o| o.src == *dst) {
                        let Some(hit) = outer.guard.intersect(image) else { continue };
                        let action = match &outer.action {
                            Action::Shift { dst, c: c2 } => Action::Shift { dst: dst.clone(), c: c + c2 },
                            constant => constant.clone(),
                        };
                        out.push(Rule { src: r.src.clone(), guard: hit.shift(-c), action });
                    }
                }
            }
        }
        RayMap::new(self.domain.clone(), out).map(RayMap::normalized)
    }

    /// `self` composed with itself `k ≥ 1` times.
    pub fn iterate(&self, k: u32) -> Result<RayMap, SymbolicError> {
        let mut acc = RayMap::identity(self.domain.clone());
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Singleton guards become constants, then adjacent rules with the same
    /// action are merged.
    pub fn normalized(self) -> RayMap {
        let mut merged: Vec<Rule> = Vec::new();
        for mut r in self.rules {
            if let IndexSet::Range { lo, hi } = r.guard {
                if lo == hi {
                    r.action = Action::Const { dst: r.action.dst().to_string(), j: r.action.apply(lo).index };
                }
            }
            if let Some(last) = merged.last_mut() {
                if let Some(joined) = join(last, &r) {
                    *last = joined;
                    continue;
                }
            }
            merged.push(r);
        }
        RayMap { domain: self.domain, rules: merged }
    }

    /// Pointwise equality, decided on the common refinement of both guard lists.
    pub fn equals(&self, other: &RayMap) -> bool {
        if self.domain != other.domain {
            return false;
        }
        for fam in self.domain.families() {
            let cuts: BTreeSet<i64> =
                self.rules.iter().chain(&other.rules).filter(|r| r.src == fam.label).map(|r| r.guard.lo()).collect();
            let cuts: Vec<i64> = cuts.into_iter().collect();
            for (i, &lo) in cuts.iter().enumerate() {
                let cell = match cuts.get(i + 1) {
                    Some(&next) => IndexSet::Range { lo, hi: next - 1 },
                    None => match fam.indices.hi() {
                        Some(hi) => IndexSet::Range { lo, hi },
                        None => IndexSet::ray(lo),
                    },
                };
                let p = RayPoint::new(&fam.label, lo);
                let (Ok(a), Ok(b)) = (self.rule_at(&p), other.rule_at(&p)) else { return false };
                let agree = match (&a.action, &b.action) {
                    (Action::Shift { .. }, Action::Shift { .. }) | (Action::Const { .. }, Action::Const { .. }) => {
                        a.action == b.action
                    }
                    _ => cell.cardinal() == Cardinal::Finite(1) && a.action.apply(lo) == b.action.apply(lo),
                };
                if !agree {
                    return false;
                }
            }
        }
        true
    }

    /// `f⁻¹(p)` as a list of guard pieces.
    pub fn fiber(&self, p: &RayPoint) -> Result<Vec<FiberPiece>, SymbolicError> {
        if !self.domain.contains(p) {
            return Err(SymbolicError::PointOutsideDomain(p.to_string()));
        }
        let mut out = Vec::new();
        for r in &self.rules {
            match &r.action {
                Action::Const { dst, j } if *dst == p.label && *j == p.index => {
                    out.push(FiberPiece { label: r.src.clone(), indices: r.guard });
                }
                Action::Shift { dst, c } if *dst == p.label && r.guard.contains(p.index - c) => {
                    out.push(FiberPiece { label: r.src.clone(), indices: IndexSet::point(p.index - c) });
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// `#f⁻¹(p)`: shift rules add at most one point, constant rules their whole guard.
    pub fn fiber_cardinal(&self, p: &RayPoint) -> Result<Cardinal, SymbolicError> {
        Ok(self.fiber(p)?.iter().fold(Cardinal::Finite(0), |acc, piece| acc + piece.indices.cardinal()))
    }

    /// `sup { #f⁻¹(x) : x ≠ x0 }`.
    ///
    /// Fiber sizes are constant between consecutive cut points (a constant
    /// target `j` cuts at `j` and `j+1`, a shifted guard at its image's ends),
    /// so the first two points of every cell are enough.
    pub fn max_fiber_excluding(&self, x0: &RayPoint) -> Result<Cardinal, SymbolicError> {
        let mut best = Cardinal::Finite(0);
        for fam in self.domain.families() {
            let mut cuts = BTreeSet::from([fam.indices.lo()]);
            for r in self.rules.iter().filter(|r| r.action.dst() == fam.label) {
                let image = r.action.image(r.guard);
                cuts.insert(image.lo());
                if let Some(h) = image.hi() {
                    cuts.insert(h + 1);
                }
            }
            for b in cuts {
                for j in [b, b + 1] {
                    let p = RayPoint::new(&fam.label, j);
                    if fam.indices.contains(j) && p != *x0 {
                        best = best.max(self.fiber_cardinal(&p)?);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Fiber data at `x0` for the certifier, with `f⁻²` from the composed rules.
    pub fn fiber_profile(&self, x0: &RayPoint) -> Result<FiberProfile<RayPoint>, SymbolicError> {
        let square = self.compose(self)?;
        Ok(FiberProfile {
            point: x0.clone(),
            fiber1: self.fiber_cardinal(x0)?,
            fiber2: square.fiber_cardinal(x0)?,
            max_other_fiber: self.max_fiber_excluding(x0)?,
            not_fixed: self.eval(x0)? != *x0,
        })
    }

    /// Restricts every family to indices `≤ top` (finite families keep their
    /// own end when it is lower). Images above `top` are clamped to `top` in
    /// their family and reported.
    pub fn materialize(&self, top: i64) -> Result<Materialized, SymbolicError> {
        let mut points = Vec::new();
        for fam in self.domain.families() {
            let hi = fam.indices.hi().map_or(top, |h| h.min(top));
            if hi < fam.indices.lo() {
                return Err(SymbolicError::BadTop { label: fam.label.clone(), top });
            }
            points.extend((fam.indices.lo()..=hi).map(|j| RayPoint::new(&fam.label, j)));
        }
        let index_of = |p: &RayPoint| points.iter().position(|q| q == p);
        let mut table = Vec::with_capacity(points.len());
        let mut clamped = Vec::new();
        for p in &points {
            let mut y = self.eval(p)?;
            if y.index > top {
                clamped.push(p.clone());
                y.index = top;
            }
            table.push(index_of(&y).expect("clamped image lies in the kept range"));
        }
        let labels = points.iter().map(ToString::to_string).collect();
        let map = Endofunction::new(table).expect("images are indices of kept points");
        Ok(Materialized { map: LabeledEndofunction { map, labels: Some(labels) }, points, clamped })
    }

    /// Every family finite: the exact finite map, no clamping.
    pub fn to_finite(&self) -> Option<Materialized> {
        let top = self.domain.families().iter().map(|f| f.indices.hi()).collect::<Option<Vec<_>>>()?;
        self.materialize(top.into_iter().max()?).ok()
    }
}

fn join(a: &Rule, b: &Rule) -> Option<Rule> {
    let a_hi = a.guard.hi()?;
    if a.src != b.src || a_hi + 1 != b.guard.lo() {
        return None;
    }
    let guard = match b.guard.hi() {
        Some(h) => IndexSet::Range { lo: a.guard.lo(), hi: h },
        None => IndexSet::ray(a.guard.lo()),
    };
    let same = a.action == b.action
        || matches!((&a.action, &b.action, b.guard),
            (Action::Shift { .. }, Action::Const { .. }, IndexSet::Range { lo, hi }) if lo == hi && a.action.apply(lo) == b.action.apply(lo));
    same.then(|| Rule { src: a.src.clone(), guard, action: a.action.clone() })
}

impl fmt::Display for RayMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
