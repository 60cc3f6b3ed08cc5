//! Competitive differential evolution.
//!
//! A derivative-free global-optimization library built around the classic
//! DE loop and its competitive winner-to-best variant, a catalog of
//! constrained engineering design benchmarks plus classical test
//! functions, a reproducible experiment runner, and a nonparametric
//! statistical comparison pipeline (rank-sum tests with Holm correction,
//! verdict matrices, average ranks).
//!
//! Every run is fully determined by its seed; trials, result files, and
//! comparison reports reproduce bit for bit.

pub mod cli;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod problems;
pub mod rng;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
