//! Coupled skinny baker's maps: exact stepping, exact sampling of the
//! physical measure through the conjugacy to the uncoupled system, Lyapunov
//! spectra, and fractal dimension estimators.

pub mod coupling;
pub mod dimension;
pub mod dynamics;
pub mod error;
pub mod lyapunov;
pub mod measure;
pub mod orbit;
pub mod rng;
pub mod stats;

pub use coupling::{
    cos_sin_coupling, make_cohomologous_coupling, make_probe, make_trig_coupling, CouplingFunction,
    TrigEnsemble, TrigTerm,
};
pub use dynamics::{
    absorbing_bounds, baker_inverse, baker_step, coupled_step, jacobian, AbsorbingBox, CoupledMap, Interval,
    Jacobian4, Params, State2, State4,
};
pub use error::{Error, Result};
pub use measure::{
    conjugacy_map, empirical_modulus, past_history, sample_coupled_measure, sample_uncoupled_measure,
    ConjugacyResult, MeasureSampler, OrbitSampler, PastHistory, UncoupledSample,
};
pub use orbit::Orbit;
pub use stats::{LineFit, MeanEstimate};
pub use lyapunov::{
    d1_uncoupled_closed_form, dl_uncoupled_closed_form, kaplan_yorke, lyapunov_exact, lyapunov_numerical,
    DimensionValue, ExponentSpectrum,
};
pub use dimension::{DimensionEstimate, PointCloud, ScaleWindow};
