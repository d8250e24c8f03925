//! Exploratory landscape analysis under random Gaussian embeddings.
//!
//! Benchmark functions are sampled with Latin hypercube designs, projected
//! to lower dimension, and characterized by 61 landscape features in both
//! spaces. The normalized difference between the two feature vectors is
//! the shift this crate measures, aggregates and plots.

pub mod doe;
pub mod ela;
pub mod embed;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;
pub mod seed;
pub mod shift;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
/// Matrix types used throughout the public API.
pub use nalgebra;
