//! Finite-dimensional E-g-frames: operator sequences mixed by a matrix `E`, their frame
//! operators and sharp bounds, canonical duals, and verifiers for the stability results.

pub mod cli;
pub mod error;
pub mod frames;
pub mod generators;
pub mod io;
pub mod model;
pub mod numerics;
pub mod runner;
pub mod selftest;
pub mod theorems;
pub mod tolerance;
pub mod transform;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, C64};
pub use tolerance::Tolerances;
