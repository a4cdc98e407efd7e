//! Robust empirical risk minimization.
//!
//! The expected loss of a predictor is estimated by a Huber M-estimator over
//! the means of disjoint sample blocks, and linear models are trained by
//! gradient descent on that estimate. The crate provides the estimator (on a
//! fixed partition and averaged over random permutations), the descent
//! algorithms with median-of-means and two-stage variants, simulators for
//! contaminated benchmarks, and evaluation helpers for Monte Carlo studies
//! and median-based cross-validation.
//!
//! ```
//! use robust_erm::robust_mean::{robust_mean_fixed, BlockPartition, RobustMeanConfig};
//!
//! let values = [1.0, 1.2, 0.9, 1.1, 0.8, 1.0, 50.0, 1.3, 1.1];
//! let partition = BlockPartition::consecutive(values.len(), 9).unwrap();
//! let est = robust_mean_fixed(&values, &partition, &RobustMeanConfig::new(9, 1.0)).unwrap();
//! assert!(est.estimate < 2.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod eval;
pub mod exec;
pub mod models;
pub mod optim;
pub mod rho;
pub mod robust_mean;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
pub use models::{Dataset, LossKind, Model};
