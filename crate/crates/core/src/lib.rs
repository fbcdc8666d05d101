//! Born-Markov open quantum system engine.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod cli;
pub mod config;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod quad;
pub mod qubit;
pub mod special;
pub mod superop;
pub mod system;
#[cfg(test)]
mod testutil;
pub mod wick;

pub use error::{Error, Result};
