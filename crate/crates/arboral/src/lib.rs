//! Arborally satisfied point sets: the geometric view of binary search
//! tree access sequences.
//!
//! An access sequence over keys 1..=n is a set of grid points, one per
//! time step. A superset of those points is arborally satisfied when every
//! axis-unaligned pair of its points has another point in or on the
//! rectangle they span. The cheapest satisfied superset lower-bounds the
//! cost of any binary search tree serving the sequence, so algorithms that
//! produce small satisfied supersets online are of direct interest.
//!
//! The crate provides:
//!
//! - [`geometry`]: instances, point sets, and satisfaction checking;
//! - [`greedy`]: the online sweep that satisfies each access line as it
//!   arrives, with full traces;
//! - [`oracle`]: an exact minimum-augmentation search for small instances;
//! - [`analysis`]: verifiers for the structural invariants that bound the
//!   sweep's total cost;
//! - [`generate`]: deterministic access-pattern generators;
//! - [`io`]: text and report formats.

pub mod analysis;
pub mod generate;
pub mod geometry;
pub mod greedy;
pub mod io;
pub mod oracle;

pub use generate::{GeneratorSpec, Pattern};
pub use geometry::{AugmentedSet, Instance, Point};
pub use greedy::GreedyTrace;
pub use oracle::{min_arb, OracleResult, OracleStatus, SearchLimits};
