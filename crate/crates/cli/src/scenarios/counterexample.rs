//! Cohomologous coupling: the conjugacy collapses to `w + g̃(x, y)`, so
//! `μ_g` keeps the dimension of the uncoupled measure even though `α < β`.

use bakerdim_core::coupling::SIN_SQ_TANH;
use bakerdim_core::rng::{derive_seed, stream};
use bakerdim_core::{
    conjugacy_map, d1_uncoupled_closed_form, dl_uncoupled_closed_form, make_cohomologous_coupling, CouplingFunction,
    MeasureSampler,
};

use super::{correlation_estimate, fmt_check, sample_cloud, Recorder};
use crate::config::{CouplingKind, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::Estimate;
use crate::output::Csv;

pub(super) fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> CliResult<()> {
    if cfg.coupling != Some(CouplingKind::CohomologousSin2Tanh) {
        return Err(CliError::Config("counterexample needs coupling = \"cohomologous-sin2tanh\"".into()));
    }
    let p = cfg.params()?;
    let gt = CouplingFunction::Analytic(SIN_SQ_TANH);
    let g = make_cohomologous_coupling(&p, gt.clone());
    let tol = cfg.tolerance_telescoping.unwrap_or(1e-10);

    // Depth from the tail bound at a hundredth of the tolerance, leaving the
    // rest for rounding in the series.
    let sampler = MeasureSampler::coupled(p, g.clone(), tol / 100.0);
    let depth = sampler.truncation_depth();
    let n_tel = cfg.telescoping_points.unwrap_or(1000);
    let seed = derive_seed(cfg.seed(), "telescoping");
    let mut table = Csv::new(&["x", "y", "w", "h_w", "w_plus_gtilde", "residual"]);
    let mut worst: f64 = 0.0;
    for i in 0..n_tel {
        let v = sampler.draw_uncoupled(&mut stream(seed, i as u64));
        let h = conjugacy_map(&p, &g, &v, depth);
        let s = v.state;
        let target = s.w + gt.eval(s.x, s.y);
        let r = (h.image.w - target).abs();
        worst = worst.max(r);
        table.push(vec![s.x.into(), s.y.into(), s.w.into(), h.image.w.into(), target.into(), r.into()]);
    }
    rec.emit_csv("telescoping.csv", &table)?;
    rec.note(format!(
        "g = {}; truncation depth {depth} from the tail bound sup|g| beta^N / (1 - beta) <= {:e}",
        g.describe(),
        tol / 100.0
    ));
    rec.estimate(
        Estimate::new("max telescoping residual |h_w - (w + g~(x, y))|", worst).with_reference("0", 0.0, Some(tol)),
    );
    let passed = worst <= tol;
    rec.check(
        "telescoping identity",
        passed,
        format!("max residual {worst:.3e} over {n_tel} points at depth {depth} (tolerance {tol:e})"),
    );
    if !passed {
        // A residual this large means the conjugacy or the coupling is wrong;
        // nothing downstream is meaningful.
        rec.warn("telescoping residual above tolerance; stopping before the dimension estimate");
        return Ok(());
    }

    let d1 = d1_uncoupled_closed_form(&p);
    let dl = dl_uncoupled_closed_form(&p).value;
    let dtol = cfg.tolerance_dimension();
    let margin = cfg.separation_margin.unwrap_or(0.06);
    let n = cfg.samples.unwrap_or(1_000_000);
    let cloud = sample_cloud(p, &g, derive_seed(cfg.seed(), "samples"), n, "counterexample")?;
    let (est, record) = correlation_estimate(cfg, rec, &cloud, "d2", "d2")?;
    rec.estimate(record.with_reference("D1 of the uncoupled measure", d1, Some(dtol)));
    rec.check("D2 matches D1 of the uncoupled measure", (est.value - d1).abs() <= dtol, fmt_check(est.value, d1, dtol));
    rec.check(
        "D2 strictly below D_L",
        est.value < dl - margin,
        format!("D2 {:.6} vs D_L - {margin} = {:.6}", est.value, dl - margin),
    );
    Ok(())
}
