//! Verification and computation toolkit for the Kashaev equation, the
//! hexahedron and K-hexahedron recurrences, their coherence theory on
//! lattices and cubical complexes, the principal-minor realizability test
//! for symmetric matrices, and a generalized family of box-shaped
//! recurrences.
//!
//! Identity checks run in exact rational arithmetic whenever the inputs are
//! rational; forward recurrences that need square roots run in float mode
//! under an explicit tolerance context. Per-cube and per-identity checks are
//! data-parallel (rayon) with the default `parallel` feature; disabling it
//! yields a dependency-free sequential build of the same code paths.

pub mod complex;
pub mod exec;
pub mod genrec;
pub mod gf2;
pub mod kashaev;
pub mod minors;
pub mod report;
pub mod scalar;
pub mod tiling;

pub use report::{Finding, NumericMode, Report, Verdict};
pub use scalar::{Scalar, ScalarError, ToleranceContext};
