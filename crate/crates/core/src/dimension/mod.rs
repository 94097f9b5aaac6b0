//! Fractal dimension estimators for point clouds.
//!
//! Every estimator computes a raw statistic per scale and hands the table
//! to [`fit_dimension`], so results can be recomputed from the emitted
//! per-scale rows.

pub mod cloud;
pub mod fit;
pub mod grid;
pub mod pairs;
pub mod pointwise;
pub mod potential;

pub use cloud::PointCloud;
pub use fit::{fit_dimension, fit_dimension_min_count, DimensionEstimate, FitMethod, ScaleStat, ScaleWindow, Transform, MIN_SCALES};
pub use grid::{
    box_count, box_count_with_offset, box_dimension, box_dimension_with, information_dimension_grid,
    information_dimension_grid_with, BoxCount,
};
pub use pairs::{
    brute_force_pair_count, correlation_dimension, correlation_dimension_with, correlation_sum, pair_counts, PairCount,
    PairOptions,
};
pub use pointwise::{averaged_pointwise_dimension, pointwise_dimension};
pub use potential::{s_potential, Divergence, PartialMean, PotentialEstimate};
