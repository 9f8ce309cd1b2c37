//! Point interactions in two dimensions realized as limits of elliptic
//! operators on domains with a small hole carrying a singularly scaled Robin
//! condition.
//!
//! The library provides:
//!
//! - hole geometry and the boundary-coefficient calculus ([`geometry`]),
//! - the special functions the closed forms need ([`specfun`]),
//! - defect functions with a prescribed logarithmic singularity ([`green`]),
//! - the limit point-interaction operator, its resolvent and its disc
//!   spectrum ([`limitop`]),
//! - exact and finite-element solvers for the perturbed problems
//!   ([`perturbed`], [`femcore`]),
//! - sweep orchestration and convergence-rate fitting ([`harness`]),
//! - a configuration-driven CLI ([`cli`]).

pub mod cli;
pub mod error;
pub mod femcore;
pub mod geometry;
pub mod green;
pub mod harness;
pub mod limitop;
pub mod perturbed;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
