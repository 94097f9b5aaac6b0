use bakerdim_core::lyapunov::kaplan_yorke_values;
use bakerdim_core::rng::derive_seed;
use bakerdim_core::{dl_uncoupled_closed_form, lyapunov_exact, lyapunov_numerical, MeasureSampler};

use super::Recorder;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::manifest::Estimate;
use crate::output::Csv;

pub(super) fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> CliResult<()> {
    let p = cfg.params()?;
    let g = cfg.coupling_function()?;
    let tol = cfg.tolerance_exponent.unwrap_or(1e-6);
    let n = cfg.n_iters.unwrap_or(10_000);
    let renorm = cfg.renorm_every.unwrap_or(8);
    let start = MeasureSampler::coupled_default(p, g.clone()).sample(derive_seed(cfg.seed(), "start"), 0);
    let num = lyapunov_numerical(&p, &g, start, n, renorm)?;
    let exact = lyapunov_exact(&p);
    rec.note(format!("g = {}", g.describe()));
    rec.note(format!(
        "start ({}, {}, {}, {}); {} iterations, renormalization every {renorm}, {} restarts",
        start.x, start.y, start.z, start.w, num.orbit_length, num.restarts
    ));

    let mut worst: f64 = 0.0;
    for (i, (v, e)) in num.values.iter().zip(&exact.values).enumerate() {
        worst = worst.max((v - e).abs());
        rec.estimate(Estimate::new(format!("chi_{}", i + 1), *v).with_reference("exact", *e, Some(tol)));
    }
    rec.check(
        "numerical exponents match {log 2, log 2, log alpha, log beta}",
        worst <= tol,
        format!("max |diff| {worst:.3e} vs tolerance {tol:e}"),
    );
    let ky = kaplan_yorke_values(&num.values);
    let dl = dl_uncoupled_closed_form(&p);
    rec.estimate(Estimate::new("kaplan_yorke", ky.value).with_reference("D_L closed form", dl.value, None));

    let mut header = vec!["renormalization".to_string()];
    header.extend((1..=num.values.len()).map(|i| format!("chi_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header);
    for (k, row) in num.convergence_history.iter().enumerate() {
        let mut cells = vec![(k + 1).into()];
        cells.extend(row.iter().map(|&v| v.into()));
        csv.push(cells);
    }
    rec.emit_csv("lyapunov_convergence.csv", &csv)?;
    Ok(())
}
