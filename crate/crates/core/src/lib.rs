//! Generalized means, medians and variability for data that only comes with
//! a distance function.
//!
//! The Fréchet functional `f(c) = Σ d(xᵢ, c)^p` is minimized over candidate
//! points: at p = 2 the minimizers generalize the mean and the minimum value
//! the variance, at p = 1 they generalize the median. Backends supply the
//! metric:
//!
//! - [`circular`]: shortest-arc distance on angles, with continuous
//!   minimization over the whole circle,
//! - [`editdist`]: Levenshtein distance between spellings,
//! - [`groups`]: the word metric of a finite group with generators.
//!
//! [`inference`] compares the variability of two samples with a permutation
//! test.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the
//! default); see [`exec::Exec`].

pub mod circular;
pub mod datasets;
pub mod editdist;
mod error;
pub mod exec;
pub mod format;
pub mod frechet;
pub mod groups;
pub mod inference;
pub mod metric;

pub use error::{Error, Result};
pub use exec::Exec;
pub use frechet::{
    distance_matrix, frechet_value, minimize_over_candidates, FrechetOptions, FrechetResult,
    MetricMatrix,
};
pub use metric::Metric;
