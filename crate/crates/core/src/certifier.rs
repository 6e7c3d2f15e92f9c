//! Non-existence certificates for iterative roots.
//!
//! A self-map `f` has no iterative root of any order `n ≥ 2` when some point
//! `x0` with `f(x0) ≠ x0` has a second preimage `f⁻²(x0)` that is large
//! compared to every first preimage `f⁻¹(x)`, `x ≠ x0`:
//!
//! * **C1**: `#f⁻²(x0) > N³` and `#f⁻¹(x) ≤ N` for all `x ≠ x0`;
//! * **C2**: `f⁻²(x0)` is infinite and every other `f⁻¹(x)` is finite;
//! * **C3**: `f⁻²(x0)` is uncountable and every other `f⁻¹(x)` is countable.
//!
//! Cardinalities are tracked on the three-level lattice
//! `Finite(k) < Aleph0 < Continuum`, which is all that finite, piecewise-affine
//! and ray-indexed maps can produce.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endo::Endofunction;

/// Cardinality on the lattice `Finite(k) < ℵ₀ < 𝔠`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinal {
    Finite(u64),
    Aleph0,
    Continuum,
}

impl Cardinal {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinal::Finite(_))
    }

    pub fn is_countable(self) -> bool {
        self <= Cardinal::Aleph0
    }

    pub fn finite_value(self) -> Option<u64> {
        match self {
            Cardinal::Finite(k) => Some(k),
            _ => None,
        }
    }

    /// Cardinal product, `None` only on `u64` overflow.
    pub fn checked_mul(self, rhs: Cardinal) -> Option<Cardinal> {
        use Cardinal::*;
        Some(match (self, rhs) {
            (Finite(0), _) | (_, Finite(0)) => Finite(0),
            (Finite(a), Finite(b)) => Finite(a.checked_mul(b)?),
            (Continuum, _) | (_, Continuum) => Continuum,
            _ => Aleph0,
        })
    }

    /// Cardinal sum, `None` only on `u64` overflow.
    pub fn checked_add(self, rhs: Cardinal) -> Option<Cardinal> {
        use Cardinal::*;
        Some(match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a.checked_add(b)?),
            (a, b) => a.max(b),
        })
    }

    /// Upper bound on the size of a union of `count` sets of size at most `each`.
    pub fn union_bound(count: Cardinal, each: Cardinal) -> Cardinal {
        count.checked_mul(each).unwrap_or(Cardinal::Aleph0)
    }

    pub fn cube(self) -> Option<Cardinal> {
        self.checked_mul(self)?.checked_mul(self)
    }
}

impl std::ops::Mul for Cardinal {
    type Output = Cardinal;

    fn mul(self, rhs: Cardinal) -> Cardinal {
        self.checked_mul(rhs).expect("finite cardinal product overflowed u64")
    }
}

impl std::ops::Add for Cardinal {
    type Output = Cardinal;

    fn add(self, rhs: Cardinal) -> Cardinal {
        self.checked_add(rhs).expect("finite cardinal sum overflowed u64")
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(k) => write!(f, "{k}"),
            Cardinal::Aleph0 => write!(f, "aleph_0"),
            Cardinal::Continuum => write!(f, "continuum"),
        }
    }
}

/// Preimage data at a candidate point `x0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberProfile<P> {
    pub point: P,
    /// `#f⁻¹(x0)`
    pub fiber1: Cardinal,
    /// `#f⁻²(x0)`
    pub fiber2: Cardinal,
    /// `sup { #f⁻¹(x) : x ≠ x0 }`
    pub max_other_fiber: Cardinal,
    /// `f(x0) ≠ x0`
    pub not_fixed: bool,
}

impl<P> FiberProfile<P> {
    pub fn map_point<Q>(self, f: impl FnOnce(P) -> Q) -> FiberProfile<Q> {
        FiberProfile {
            point: f(self.point),
            fiber1: self.fiber1,
            fiber2: self.fiber2,
            max_other_fiber: self.max_other_fiber,
            not_fixed: self.not_fixed,
        }
    }

    /// Which case, if any, the profile satisfies. Checked in the order C3, C2, C1.
    pub fn matching_case(&self) -> Option<Case> {
        if !self.not_fixed {
            return None;
        }
        if self.fiber2 == Cardinal::Continuum && self.max_other_fiber.is_countable() {
            return Some(Case::C3);
        }
        if !self.fiber2.is_finite() && self.max_other_fiber.is_finite() {
            return Some(Case::C2);
        }
        if let Some(n) = self.max_other_fiber.finite_value() {
            let n = n.max(1);
            let bound = (n as u128).pow(3);
            if let Some(m) = self.fiber2.finite_value() {
                if m as u128 > bound {
                    return Some(Case::C1);
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    C1,
    C2,
    C3,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub const CERTIFICATE_SCOPE: &str = "no iterative roots of any order n >= 2";

/// Witness that `f` has no iterative root of any order `n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRootCertificate<P> {
    pub x0: P,
    pub case: Case,
    pub evidence: FiberProfile<P>,
    pub scope: String,
}

impl<P: Clone> NonRootCertificate<P> {
    /// Wraps a profile if it satisfies one of the three cases.
    pub fn from_profile(profile: FiberProfile<P>) -> Option<Self> {
        let case = profile.matching_case()?;
        Some(NonRootCertificate {
            x0: profile.point.clone(),
            case,
            evidence: profile,
            scope: CERTIFICATE_SCOPE.to_string(),
        })
    }

    pub fn map_point<Q: Clone>(self, f: impl Fn(P) -> Q) -> NonRootCertificate<Q> {
        NonRootCertificate { x0: f(self.x0), case: self.case, evidence: self.evidence.map_point(&f), scope: self.scope }
    }

    /// Re-checks the case invariants against the stored evidence.
    pub fn is_consistent(&self) -> bool {
        let e = &self.evidence;
        if !e.not_fixed {
            return false;
        }
        match self.case {
            Case::C1 => match (e.max_other_fiber, e.fiber2) {
                (Cardinal::Finite(n), Cardinal::Finite(m)) => m as u128 > (n.max(1) as u128).pow(3),
                (Cardinal::Finite(_), _) => true,
                _ => false,
            },
            Case::C2 => !e.fiber2.is_finite() && e.max_other_fiber.is_finite(),
            Case::C3 => e.fiber2 == Cardinal::Continuum && e.max_other_fiber.is_countable(),
        }
    }
}

/// Why no certificate was issued. Abstaining never means a root exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstainReason {
    /// Every candidate is a fixed point.
    NoNonFixedPoint,
    /// A fixed point meets the preimage inequality, but no non-fixed point does.
    FixedPointObstruction,
    /// At the closest candidate some other fiber is at least as large as `f⁻²(x0)`.
    FibersTooLarge,
    /// At the closest candidate `N < #f⁻²(x0) ≤ N³`.
    StrictInequalityFails,
    /// No candidate point was supplied.
    NoCandidates,
}

impl AbstainReason {
    pub fn describe(self) -> &'static str {
        match self {
            AbstainReason::NoNonFixedPoint => "every candidate point is fixed",
            AbstainReason::FixedPointObstruction => "only a fixed point has a large second preimage",
            AbstainReason::FibersTooLarge => "another fiber is as large as the second preimage",
            AbstainReason::StrictInequalityFails => "strict inequality #f^-2(x0) > N^3 fails",
            AbstainReason::NoCandidates => "no candidate points",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abstention<P> {
    pub reason: AbstainReason,
    /// `#f⁻²(x0) = N³` exactly at the closest candidate.
    pub boundary: bool,
    /// The candidate that came closest to satisfying a criterion.
    pub closest: Option<FiberProfile<P>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Certification<P> {
    Certified(NonRootCertificate<P>),
    Abstained(Abstention<P>),
}

impl<P> Certification<P> {
    pub fn map_point<Q: Clone>(self, f: impl Fn(P) -> Q) -> Certification<Q>
    where
        P: Clone,
    {
        match self {
            Certification::Certified(c) => Certification::Certified(c.map_point(f)),
            Certification::Abstained(a) => Certification::Abstained(Abstention {
                reason: a.reason,
                boundary: a.boundary,
                closest: a.closest.map(|p| p.map_point(&f)),
            }),
        }
    }

    pub fn certificate(&self) -> Option<&NonRootCertificate<P>> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Abstained(_) => None,
        }
    }

    pub fn abstention(&self) -> Option<&Abstention<P>> {
        match self {
            Certification::Certified(_) => None,
            Certification::Abstained(a) => Some(a),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    /// A non-fixed `x0` lies outside its own fiber, so
    /// `#f⁻²(x0) ≤ #f⁻¹(x0) · sup_{x≠x0} #f⁻¹(x)` must hold.
    #[error("profile at {point} violates #f^-2 <= #f^-1 * max_other ({fiber2} > {fiber1} * {max_other}); a fixed point flagged not_fixed?")]
    SecondFiberTooLarge { point: String, fiber1: Cardinal, fiber2: Cardinal, max_other: Cardinal },
    #[error("profile at {point} has empty first fiber but nonempty second fiber")]
    EmptyFirstFiber { point: String },
}

/// Which preimage the finite certifier compares against `N³`.
///
/// Only [`Criterion::SecondPreimage`] is sound. [`Criterion::FirstPreimageOnly`]
/// exists as a negative control for the soundness tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Criterion {
    #[default]
    SecondPreimage,
    FirstPreimageOnly,
}

/// C1 scan over a finite endofunction, in index order.
pub fn certify_finite(f: &Endofunction) -> Certification<usize> {
    certify_finite_with(f, Criterion::SecondPreimage)
}

pub fn certify_finite_with(f: &Endofunction, criterion: Criterion) -> Certification<usize> {
    let n = f.len();
    let counts = f.fiber_counts();
    // top two fiber sizes give max_{x ≠ x0} in O(1)
    let (mut top, mut top_at, mut second) = (0u64, usize::MAX, 0u64);
    for (x, &c) in counts.iter().enumerate() {
        if c > top {
            second = top;
            top = c;
            top_at = x;
        } else if c > second {
            second = c;
        }
    }
    let max_other = |x: usize| if x == top_at { second } else { top };
    let fiber2 = |x: usize| -> u64 { f.fiber_iter(x).map(|y| counts[y]).sum() };

    let profile = |x: usize| {
        let f1 = counts[x];
        let big = match criterion {
            Criterion::SecondPreimage => fiber2(x),
            Criterion::FirstPreimageOnly => f1,
        };
        FiberProfile {
            point: x,
            fiber1: Cardinal::Finite(f1),
            fiber2: Cardinal::Finite(big),
            max_other_fiber: Cardinal::Finite(max_other(x)),
            not_fixed: f.apply(x) != x,
        }
    };

    let mut any_non_fixed = false;
    let mut closest: Option<FiberProfile<usize>> = None;
    for x in 0..n {
        if f.apply(x) == x {
            continue;
        }
        any_non_fixed = true;
        let p = profile(x);
        if p.matching_case() == Some(Case::C1) {
            return Certification::Certified(NonRootCertificate::from_profile(p).expect("C1 matched"));
        }
        if closest.as_ref().is_none_or(|c| ratio_gt(&p, c)) {
            closest = Some(p);
        }
    }

    if !any_non_fixed {
        return Certification::Abstained(Abstention {
            reason: AbstainReason::NoNonFixedPoint,
            boundary: false,
            closest: None,
        });
    }
    let fixed_hit = (0..n).filter(|&x| f.apply(x) == x).map(profile).find(|p| {
        let m = p.fiber2.finite_value().unwrap_or(0) as u128;
        let k = p.max_other_fiber.finite_value().unwrap_or(0) as u128;
        m > k.pow(3)
    });
    if let Some(p) = fixed_hit {
        return Certification::Abstained(Abstention {
            reason: AbstainReason::FixedPointObstruction,
            boundary: false,
            closest: Some(p),
        });
    }
    let closest = closest.expect("some non-fixed candidate exists");
    Certification::Abstained(classify_failure(closest))
}

/// `a.fiber2 / max(a.N,1)³ > b.fiber2 / max(b.N,1)³`, finite profiles only.
fn ratio_gt(a: &FiberProfile<usize>, b: &FiberProfile<usize>) -> bool {
    let key = |p: &FiberProfile<usize>| {
        let m = p.fiber2.finite_value().unwrap_or(0) as u128;
        let n = p.max_other_fiber.finite_value().unwrap_or(0).max(1) as u128;
        (m, n.pow(3))
    };
    let (ma, da) = key(a);
    let (mb, db) = key(b);
    ma * db > mb * da
}

fn classify_failure<P>(closest: FiberProfile<P>) -> Abstention<P> {
    let reason = if closest.max_other_fiber >= closest.fiber2 {
        AbstainReason::FibersTooLarge
    } else {
        AbstainReason::StrictInequalityFails
    };
    let boundary = match (closest.max_other_fiber, closest.fiber2) {
        (Cardinal::Finite(n), Cardinal::Finite(m)) => (n.max(1) as u128).pow(3) == m as u128,
        _ => false,
    };
    Abstention { reason, boundary, closest: Some(closest) }
}

/// Validates a profile's internal consistency.
pub fn check_profile<P: fmt::Display>(p: &FiberProfile<P>) -> Result<(), ProfileError> {
    if p.fiber1 == Cardinal::Finite(0) && p.fiber2 != Cardinal::Finite(0) {
        return Err(ProfileError::EmptyFirstFiber { point: p.point.to_string() });
    }
    if p.not_fixed {
        let bound = Cardinal::union_bound(p.fiber1, p.max_other_fiber);
        if p.fiber2 > bound {
            return Err(ProfileError::SecondFiberTooLarge {
                point: p.point.to_string(),
                fiber1: p.fiber1,
                fiber2: p.fiber2,
                max_other: p.max_other_fiber,
            });
        }
    }
    Ok(())
}

/// First profile (in supplied order) matching C3, C2 or C1.
pub fn certify_profiled<P, I>(profiles: I) -> Result<Certification<P>, ProfileError>
where
    P: Clone + fmt::Display,
    I: IntoIterator<Item = FiberProfile<P>>,
{
    let mut closest: Option<FiberProfile<P>> = None;
    let mut saw_any = false;
    let mut saw_non_fixed = false;
    for p in profiles {
        check_profile(&p)?;
        saw_any = true;
        if !p.not_fixed {
            continue;
        }
        saw_non_fixed = true;
        if let Some(cert) = NonRootCertificate::from_profile(p.clone()) {
            return Ok(Certification::Certified(cert));
        }
        let better = match &closest {
            None => true,
            Some(c) => {
                (p.fiber2, std::cmp::Reverse(p.max_other_fiber)) > (c.fiber2, std::cmp::Reverse(c.max_other_fiber))
            }
        };
        if better {
            closest = Some(p);
        }
    }
    if !saw_any {
        return Ok(Certification::Abstained(Abstention {
            reason: AbstainReason::NoCandidates,
            boundary: false,
            closest: None,
        }));
    }
    if !saw_non_fixed {
        return Ok(Certification::Abstained(Abstention {
            reason: AbstainReason::NoNonFixedPoint,
            boundary: false,
            closest: None,
        }));
    }
    Ok(Certification::Abstained(classify_failure(closest.expect("non-fixed candidate seen"))))
}

impl PartialOrd for Case {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Case {
    /// Strength of the cardinality gap: C3 > C2 > C1.
    fn cmp(&self, other: &Self) -> Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}
