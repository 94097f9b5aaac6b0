//! Fixtures shared by the benchmarks.

use bakerdim_core::{cos_sin_coupling, MeasureSampler, Params, PointCloud};

/// Parameters the benchmarks run at.
pub fn params() -> Params {
    Params::new(0.3, 0.3).expect("valid parameters")
}

pub fn sampler() -> MeasureSampler {
    MeasureSampler::coupled_default(params(), cos_sin_coupling())
}

/// `n` points from the coupled measure.
pub fn cloud(n: usize) -> PointCloud {
    PointCloud::from_points(&sampler().cloud(1, n), "mu_g").expect("non-empty cloud")
}
