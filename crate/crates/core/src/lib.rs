//! Rate-distortion regions for cascade, triangular and two-way source coding
//! networks.
//!
//! The crate is organised in four layers:
//!
//! * [`prob`]: finite joint distributions and Shannon information measures.
//! * [`gaussian`]: closed-form and optimised regions for jointly Gaussian sources.
//! * [`discrete`]: region evaluators, a heuristic optimiser and a brute-force
//!   oracle for finite alphabets.
//! * [`sim`]: a Monte-Carlo random-binning simulator for the cascade scheme.

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod prob;
pub mod sim;

pub use error::{Error, Result};
