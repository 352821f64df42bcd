//! Clifford-algebra Moebius calculus for tuples of symmetric operators.
//!
//! The crate is `no_std` with `alloc`. File formats, rendering and the
//! command line live in the `cliffspec-cli` companion crate.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod calculus;
pub mod clifford;
mod error;
pub mod linalg;
pub mod moebius;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default absolute tolerance for algebraic predicates.
pub const DEFAULT_TOL: f64 = 1e-10;
