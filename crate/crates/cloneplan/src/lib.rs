//! Balanced job-cloning assignments for straggler-prone distributed computing.
//!
//! A master farms `n` jobs onto `c` servers so that every server holds exactly
//! `k` distinct jobs and every job is cloned onto exactly `r` servers
//! (`n*r = k*c`). When only a subset of servers reports back, the payoff is
//! the number of *distinct* jobs recovered. This crate provides:
//!
//! - construction and validation of balanced assignments ([`assignment`]),
//! - exact (big-rational) mean and variance of the recovered-job count under
//!   several straggler models ([`moments`]),
//! - the shape-vector algebra that classifies assignments by their pair
//!   co-occurrence histogram and pins down the variance-extremal designs
//!   ([`shapes`]),
//! - exhaustive enumeration, shape realizability search, and computational
//!   verification of the extremal-variance properties at desk scale
//!   ([`search`]),
//! - a reproducible Monte Carlo simulator for statistical cross-checks
//!   ([`simulator`]).
//!
//! The `cloneplan` binary exposes all of this as a CLI; see the README.

pub mod assignment;
pub mod cli;
pub mod combinatorics;
mod error;
pub mod moments;
pub mod report;
pub mod search;
pub mod shapes;
pub mod simulator;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
