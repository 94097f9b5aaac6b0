//! Sampling the physical measure of the coupled map.
//!
//! The uncoupled attractor is a product of two uniform intervals and two
//! Cantor sets, so it can be sampled exactly digit by digit; the conjugacy
//! series then carries each sample onto the coupled attractor.

pub mod cantor;
pub mod conjugacy;
pub mod history;
pub mod modulus;
pub mod sampler;

pub use cantor::{precision_depth, sample_cantor, CantorPoint, Digits};
pub use conjugacy::{
    conjugacy_inverse, conjugacy_map, conjugacy_map_reconstructed, conjugacy_series, sample_history, tail_bound,
    truncation_depth, ConjugacyResult, UncoupledSample, DEFAULT_SERIES_TOLERANCE, MAX_TRUNCATION_DEPTH,
};
pub use history::{history_from_digits, past_history, PastHistory};
pub use modulus::{empirical_modulus, holder_exponent, ModulusConfig, ModulusRow, ModulusTable};
pub use sampler::{
    birkhoff_average, sample_coupled_measure, sample_uncoupled_measure, MeasureSampler, OrbitSampler,
};
