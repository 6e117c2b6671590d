//! Flat bilinear forms over indefinite inner-product spaces, the special
//! forms attached to Kaehler data, a constructive diagonalization algorithm,
//! and model submanifolds of hyperbolic space on which every identity is
//! checked numerically.

pub mod bilinear;
pub mod commands;
pub mod diag;
pub mod error;
pub mod formfile;
pub mod geometry;
pub mod kaehler;
pub mod linalg;
pub mod random;
pub mod report;
pub mod space;

pub use error::{Error, Result};
pub use linalg::DEFAULT_TOL;
