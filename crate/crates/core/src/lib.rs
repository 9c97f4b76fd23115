//! Combinatorics of planar lattice diagrams.
//!
//! A diagram is stored as, per element, the left-to-right ordered lists of
//! upper and lower covers. On top of that this crate provides:
//!
//! - [`diagram`]: storage, well-formedness validation, boundary chains,
//!   irreducibles, similarity and canonical forms, and the `latdiag` text
//!   format;
//! - [`oracle`]: brute-force order-theoretic ground truth computed from the
//!   bare poset (no embedding), a small-lattice enumerator and a constructive
//!   embedder for slim lattices;
//! - [`geometry`]: cells, 4-cells, covering squares and trajectories of prime
//!   intervals and of 3-chains;
//! - [`schemes`]: tight and cover-preserving N7 sublattices, stacked N7
//!   regions, rank, anchors, and C2/C3 schemes;
//! - [`surgery`]: grids, boundary removals, corners and rectangularity,
//!   resection and insertion;
//! - [`pipeline`]: minimal-rank normalization, the slim-semimodularity
//!   decision procedure, insertion-effect verification, a persistent census
//!   of diagram similarity classes, and a search for insertion sequences
//!   that do not decrease the covering-N7 count.
//!
//! Diagrams are immutable; every operation is a pure function and surgery
//! returns new diagrams.

pub mod diagram;
pub mod error;
pub mod geometry;
pub mod limits;
pub mod oracle;
pub mod pipeline;
pub mod schemes;
pub mod surgery;

pub use diagram::{CanonicalKey, Diagram, ElementId, ValidationReport};
pub use error::{Error, Result};
