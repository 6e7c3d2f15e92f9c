//! Exact reasoning about maps on infinite discrete domains, and about
//! labelled block systems carrying two-valued measure tags.
//!
//! Ray maps act on families `x_j` indexed by a finite integer interval or a
//! ray `j ≥ a`. Each rule either shifts indices (`j ↦ j + c`) or sends a whole
//! guard to one point, so composition, equality and fiber counts are decided
//! by interval arithmetic on the guards.

mod blocks;
mod ray;

use thiserror::Error;

pub use blocks::{
    block_verify, block_verify_ex4, ex4_expected_f, ex4_g, Arrow, ArrowKind, Assertion, Block, BlockKind, BlockReport,
    BlockSystem, Measure,
};
pub use ray::{Action, Family, FiberPiece, IndexSet, Materialized, RayDomain, RayFile, RayMap, RayPoint, Rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("index set [{lo}, {hi}] is empty")]
    EmptyIndexSet { lo: i64, hi: i64 },
    #[error("family label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("rules for `{label}` do not cover {index}")]
    Gap { label: String, index: String },
    #[error("rules for `{label}` overlap at index {index}")]
    Overlap { label: String, index: i64 },
    #[error("guard {guard} lies outside family `{label}`")]
    GuardOutsideFamily { label: String, guard: String },
    #[error("rule on `{label}` {guard} sends points outside family `{dst}`")]
    ActionOutOfRange { label: String, guard: String, dst: String },
    #[error("point {0} is not in the domain")]
    PointOutsideDomain(String),
    #[error("maps have different domains")]
    DomainMismatch,
    #[error("cut-off {top} lies below the first index of `{label}`")]
    BadTop { label: String, top: i64 },
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("block `{0}` has no outgoing arrow")]
    MissingArrow(String),
    #[error("block `{0}` has more than one outgoing arrow")]
    DuplicateArrow(String),
    #[error("arrow {from} -> {to}: {why}")]
    BadArrow { from: String, to: String, why: &'static str },
}
