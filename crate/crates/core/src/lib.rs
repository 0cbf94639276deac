//! Weighted backward shift operators on `L_p(0, ∞)` and `C_0[0, ∞)`.
//!
//! Functions are represented exactly as piecewise exponential-polynomial
//! segments with rational breakpoints, optionally followed by a repeating
//! geometric tail. On top of that algebra the crate provides the bounded and
//! unbounded shifts, their powers and right inverses, certified norms,
//! periodic points, eigenvectors, transitivity witnesses and spectrum
//! classification.

pub mod constructions;
pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod piecewise;
pub mod poly;
pub mod sample;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use grid::Q;
pub use norms::{NormMethod, NormResult};
pub use operators::{ShiftSpec, WeightKind};
pub use piecewise::{GeometricTail, PiecewiseFn, Segment, Space};
