//! Sparse regression by exponentially weighted aggregation (EWA).
//!
//! The estimate is the mean of `exp(-||Y - X l||^2 / beta) pi(l)` under a
//! heavy-tailed sparsity prior `pi`, approximated by averaging an Euler
//! discretized Langevin diffusion ([`sampler`]). [`estimators`] wraps this with
//! automatic tuning and provides Lasso and oracle Lasso-Gauss baselines.
//! [`theory`] evaluates the matching risk bounds, and [`bench`] replicates the
//! synthetic experiments from [`datagen`].
//!
//! ```
//! use sparse_ewa::datagen::{gen_example1, Example1Spec};
//! use sparse_ewa::estimators::{ewa_fit, EwaConfig};
//!
//! let data = gen_example1(&Example1Spec { n: 40, m: 20, s: 2, seed: 0 })?;
//! let fit = ewa_fit(&data, &EwaConfig::default())?;
//! assert_eq!(fit.estimate.len(), 20);
//! # Ok::<(), sparse_ewa::Error>(())
//! ```

pub mod bench;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod io;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod potential;
pub mod prior;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
