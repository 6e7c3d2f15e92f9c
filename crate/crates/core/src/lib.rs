//! Certifying that self-maps have no iterative roots.
//!
//! * [`endo`] and [`root_solver`]: finite endofunctions and an exhaustive search
//!   for roots `gⁿ = f`, used as ground truth.
//! * [`certifier`]: the preimage-cardinality criterion (cases C1, C2, C3).
//! * [`pl_interval`] and [`circle`]: exact piecewise-affine maps on `[0,1]` and
//!   on the circle, with cardinal-valued preimages.
//! * [`constructor`]: builds, near any piecewise-affine circle or interval map,
//!   a map certified to have no iterative roots.
//! * [`symbolic`]: ray-indexed infinite maps and labelled block systems.
//!
//! The piecewise-affine modules are generic over [`ExactScalar`]; the aliases
//! below fix the scalar to arbitrary-precision rationals.

pub mod certifier;
pub mod circle;
pub mod constructor;
pub mod endo;
pub mod pl_interval;
pub mod root_solver;
pub mod scalar;
pub mod sets;
pub mod symbolic;

pub use certifier::{Cardinal, Case, Certification, FiberProfile, NonRootCertificate};
pub use endo::Endofunction;
pub use scalar::ExactScalar;

/// Default exact scalar.
pub type Rational = num_rational::BigRational;

/// Piecewise-affine interval map over [`Rational`].
pub type PlMap = pl_interval::PlMapInterval<Rational>;
/// Piecewise-affine interval map over 64-bit rationals; panics on overflow.
pub type PlMap64 = pl_interval::PlMapInterval<num_rational::Rational64>;
/// Admissible piecewise-affine circle map over [`Rational`].
pub type CircleMap = circle::AdmissibleCircleMap<Rational>;
pub type CircleAngle = circle::Angle<Rational>;
