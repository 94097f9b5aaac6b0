use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contraction rates must satisfy 0 < alpha, beta < 1/2 (got alpha={alpha}, beta={beta})")]
    InvalidParams { alpha: f64, beta: f64 },

    #[error("y={y} lies in the gap ({lo}, {hi}) outside the invertibility slab")]
    OutsideSlab { y: f64, lo: f64, hi: f64 },

    #[error("state ({x}, {z}) sits on a branch boundary; the derivative is undefined there")]
    OnBranchBoundary { x: f64, z: f64 },

    #[error("past history left the invertibility slab at step {index}")]
    HistoryEscape { index: usize, partial: Vec<crate::State2> },

    #[error("trig frequency {0} is not a non-negative multiple of 1/2 up to {max}", max = crate::coupling::MAX_FREQUENCY)]
    UnsupportedFrequency(f64),

    #[error("epsilon {epsilon} is degenerate for data of diameter {diameter}")]
    DegenerateScale { epsilon: f64, diameter: f64 },

    #[error("need at least {needed} usable scales, got {got}")]
    TooFewScales { needed: usize, got: usize },

    #[error("point cloud needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("point cloud contains a non-finite coordinate at index {0}")]
    NonFinitePoint(usize),

    #[error("invalid scale window [{min}, {max}]")]
    InvalidWindow { min: f64, max: f64 },

    #[error("Lyapunov estimates still moving by {delta:e} between the last two renormalizations")]
    NotConverged { delta: f64, values: Vec<f64> },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
