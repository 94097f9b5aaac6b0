//! Experiment runner for coupled skinny baker's maps: config parsing,
//! scenario drivers, CSV/SVG output and result manifests.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod scenarios;

use std::path::Path;

pub use config::{ExperimentConfig, Scenario};
pub use error::{CliError, CliResult};
pub use manifest::Manifest;

/// Resolves `cfg` for `scenario`, runs it on a pool of `threads` workers
/// (rayon's default when `None`) and writes all outputs into `out_dir`.
pub fn run_scenario(
    scenario: Scenario,
    cfg: ExperimentConfig,
    seed: Option<u64>,
    out_dir: &Path,
    threads: Option<usize>,
) -> CliResult<Manifest> {
    let cfg = cfg.resolve(scenario, seed)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Run(e.to_string()))?;
    pool.install(|| scenarios::run(scenario, cfg, out_dir))
}
