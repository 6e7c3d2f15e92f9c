//! The circle `S¹`, with points stored as exact angles `t ∈ [0,1)`.
//!
//! Only the chordal distance `|e^{2πit} − e^{2πis}|` is transcendental; it is
//! isolated in [`ComparableReal`].

mod angle;
mod comparable;
mod map;

use thiserror::Error;

pub use angle::{affine_on_arc, cyclic_order, minor_displacement, Angle, Arc, ArcAffine, Orientation};
pub use comparable::{chordal_distance, pi_enclosure, ComparableReal, Indeterminate, MAX_BITS, START_BITS};
pub use map::{AdmissibleCircleMap, CircleFile, CirclePartition, ConstantArc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("angle {t} is outside [0,1)")]
    AngleOutOfRange { t: String },
    #[error("points must be distinct")]
    NotDistinct,
    #[error("{w1} and {w2} are antipodal, so there is no minor arc between them")]
    Antipodal { w1: String, w2: String },
    #[error("arc from {at} to itself")]
    DegenerateArc { at: String },
    #[error("a partition needs at least two points, got {k}")]
    TooFewPoints { k: usize },
    #[error("partition points are not in counterclockwise order")]
    NotCyclicallySorted,
    #[error("{points} partition points but {images} images")]
    LengthMismatch { points: usize, images: usize },
    #[error("images of arc {arc} are antipodal")]
    AntipodalImages { arc: usize },
    #[error("listed constant arc {start} → {end} does not match the images")]
    ConstantArcMismatch { start: String, end: String },
    #[error("arc {arc} crosses a partition point")]
    SpansBreakpoint { arc: String },
}
