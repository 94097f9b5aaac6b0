//! Scenario drivers. Each one fills a [`Recorder`]; [`run`] turns it into a
//! manifest and writes it next to the other outputs.

mod counterexample;
mod cross_section;
mod dimension;
mod lyapunov;
mod prevalence;
mod sweep;

use std::path::Path;
use std::time::Instant;

use bakerdim_core::dimension::{correlation_dimension_with, DimensionEstimate, PointCloud};
use bakerdim_core::{CouplingFunction, MeasureSampler, Params};

use crate::config::{ExperimentConfig, Scenario};
use crate::error::CliResult;
use crate::manifest::{Estimate, Manifest, Recorder};
use crate::output::scale_table;

pub use cross_section::{w_cell_spread, CellSpread};

/// Runs `scenario` with an already resolved config and writes every output,
/// the manifest last, into `out_dir`.
pub fn run(scenario: Scenario, cfg: ExperimentConfig, out_dir: &Path) -> CliResult<Manifest> {
    let start = Instant::now();
    let mut rec = Recorder::new(out_dir);
    match scenario {
        Scenario::CrossSection => cross_section::run(&cfg, &mut rec)?,
        Scenario::Sweep => sweep::run(&cfg, &mut rec)?,
        Scenario::Prevalence => prevalence::run(&cfg, &mut rec)?,
        Scenario::Counterexample => counterexample::run(&cfg, &mut rec)?,
        Scenario::Lyapunov => lyapunov::run(&cfg, &mut rec)?,
        Scenario::Dimension => dimension::run(&cfg, &mut rec)?,
    }
    let manifest = rec.finish(scenario.name(), cfg, start.elapsed().as_secs_f64());
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// `n` exact samples of `μ_g`.
fn sample_cloud(p: Params, g: &CouplingFunction, seed: u64, n: usize, label: &str) -> CliResult<PointCloud> {
    let sampler = MeasureSampler::coupled_default(p, g.clone());
    let pts = sampler.cloud(seed, n);
    Ok(PointCloud::from_points(&pts, format!("{label}: {n} samples of mu_g, g = {}", g.describe()))?)
}

/// Correlation dimension with the configured window, its per-scale CSV
/// written as `scales_<stem>.csv`.
fn correlation_estimate(
    cfg: &ExperimentConfig,
    rec: &mut Recorder,
    cloud: &PointCloud,
    quantity: &str,
    stem: &str,
) -> CliResult<(DimensionEstimate, Estimate)> {
    let est = correlation_dimension_with(cloud, cfg.pair_window()?, &cfg.pair_options())?;
    let csv = rec.emit_csv(&format!("scales_{stem}.csv"), &scale_table(&est))?;
    let record = Estimate::dimension(quantity, &est, Some(csv));
    Ok((est, record))
}

fn fmt_check(value: f64, reference: f64, tol: f64) -> String {
    format!("value {value:.6}, reference {reference:.6}, |diff| {:.6} vs tolerance {tol}", (value - reference).abs())
}
