//! Builds, inside any uniform ball around a piecewise-affine map, a map with
//! no iterative roots of any order.
//!
//! The recipe: approximate `h` by a map `f₀` that is injective and not the
//! identity on each arc of a fine partition, then flatten a tiny arc `K` to a
//! constant `x₀` chosen so that `f(x₀) ≠ x₀` and `f⁻²(x₀)` contains an arc.
//! Every search runs over dyadic grids, coarsest first, so results are
//! reproducible.

mod circle;
mod interval;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::ProfileError;
use crate::circle::CircleError;
use crate::Rational;

pub use circle::{audit_circle, construct_non_iterate, continuity_delta, CircleConstruction, ConstructionTrace};
pub use interval::{construct_non_iterate_interval, IntervalConstruction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("epsilon must lie in (0,1), got {0}")]
    EpsilonOutOfRange(String),
    #[error("input map is discontinuous at {at}")]
    Discontinuous { at: String },
    #[error("step `{step}` failed: {detail}")]
    SearchExhausted { step: &'static str, detail: String },
    #[error("check `{name}` failed: {detail}")]
    CheckFailed { name: String, detail: String },
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// One machine-checked condition of a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), holds, detail: detail.into() }
    }
}

/// First failing check as an error.
fn require_all(checks: &[Check]) -> Result<(), ConstructError> {
    match checks.iter().find(|c| !c.holds) {
        Some(c) => Err(ConstructError::CheckFailed { name: c.name.clone(), detail: c.detail.clone() }),
        None => Ok(()),
    }
}

fn check_epsilon(eps: &Rational) -> Result<(), ConstructError> {
    use num_traits::{One, Zero};
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(ConstructError::EpsilonOutOfRange(eps.to_string()));
    }
    Ok(())
}

/// Largest `2^-m` (with `m ≥ 0`) not exceeding `bound > 0`.
fn dyadic_floor(bound: &Rational) -> (u32, Rational) {
    use crate::ExactScalar;
    let mut m = 0u32;
    let mut v = Rational::dyadic(0);
    while v > *bound {
        m += 1;
        v = Rational::dyadic(m);
    }
    (m, v)
}
