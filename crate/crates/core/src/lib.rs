//! Pure engines behind the `lcslab` simulation suite.
//!
//! Everything here is `no_std` + `alloc`: longest common / increasing
//! subsequence engines, blockwise optimal decompositions, the subset-resampled
//! Stein statistic, empirical distances and Tracy-Widom numerics. Randomness
//! flows only through [`SeedSpec`], so every function is a deterministic
//! function of its inputs.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cells;
pub mod engines;
pub mod error;
pub mod limits;
pub mod math;
pub mod models;
pub mod stein;

pub use error::{Error, Result};
pub use models::{LetterDistribution, Permutation, SeedSpec, Word};
