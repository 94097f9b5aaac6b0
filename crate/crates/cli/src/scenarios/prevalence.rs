//! Ensemble probe at `α < β`: how many random couplings give `D̂_2 ≈ D_L`.

use bakerdim_core::rng::{derive_indexed, stream};
use bakerdim_core::{d1_uncoupled_closed_form, dl_uncoupled_closed_form, make_probe, CouplingFunction};

use super::{correlation_estimate, fmt_check, sample_cloud, Recorder};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::manifest::Estimate;
use crate::output::Csv;

pub(super) fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> CliResult<()> {
    let p = cfg.params()?;
    let dl = dl_uncoupled_closed_form(&p).value;
    let d1 = d1_uncoupled_closed_form(&p);
    let tol = cfg.tolerance_dimension();
    let m = cfg.ensemble_size.unwrap_or(10);
    let n = cfg.samples.unwrap_or(1_000_000);
    let law = cfg.ensemble();
    rec.note(format!(
        "ensemble law: g = sum over a, b in 0..={} of c_ab cos(a pi x + phi_ab) sin(b pi y + psi_ab), \
         c_ab ~ N(0, {}^2 / (1 + a^2 + b^2)^2), phases uniform on [0, 2 pi). Prevalence is a statement about \
         translates of g; any absolutely continuous ensemble is a legitimate probe of it, and this is the one used",
        law.max_freq, law.sigma
    ));
    rec.note(format!("reference D_L = {dl:.6}, D1 of the uncoupled measure = {d1:.6}"));

    let mut table = Csv::new(&["member", "coupling", "d2", "d2_stderr", "r_squared", "within_tolerance", "error"]);
    let mut hits = 0usize;
    for k in 0..m {
        let g = law.draw(&mut stream(derive_indexed(cfg.seed(), "ensemble", k as u64), 0));
        let seed = derive_indexed(cfg.seed(), "member-samples", k as u64);
        let result = sample_cloud(p, &g, seed, n, &format!("member {k}"))
            .and_then(|cloud| correlation_estimate(cfg, rec, &cloud, &format!("d2[member {k}]"), &format!("member_{k:02}")));
        match result {
            Ok((est, record)) => {
                let record = record.with_reference("D_L", dl, Some(tol));
                let ok = record.within_tolerance == Some(true);
                hits += usize::from(ok);
                table.push(vec![
                    k.into(),
                    g.describe().replace(',', ";").into(),
                    est.value.into(),
                    est.slope_stderr.into(),
                    est.r_squared.into(),
                    ok.into(),
                    "".into(),
                ]);
                rec.estimate(record);
            }
            Err(e) => {
                rec.warn(format!("member {k}: estimation failed: {e}"));
                table.push(vec![
                    k.into(),
                    g.describe().replace(',', ";").into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    false.into(),
                    e.to_string().replace(',', ";").into(),
                ]);
            }
        }
    }
    rec.emit_csv("prevalence_members.csv", &table)?;
    let fraction = hits as f64 / m as f64;
    let required = cfg.required_fraction.unwrap_or(0.9);
    rec.estimate(Estimate::new("fraction of members within tolerance of D_L", fraction));
    rec.check(
        "ensemble members at D_L",
        fraction >= required,
        format!("{hits}/{m} within {tol} of D_L = {dl:.6} (need fraction >= {required})"),
    );

    // The zero member and lines g = 0 + λ·probe through it. They share one
    // sample stream, so λ = 0 reproduces the zero member exactly.
    let lambdas = cfg.lambda_grid.clone().unwrap_or_default();
    if !cfg.include_zero_member.unwrap_or(true) && lambdas.is_empty() {
        return Ok(());
    }
    let base_seed = derive_indexed(cfg.seed(), "zero-member-samples", 0);
    let zero = sample_cloud(p, &CouplingFunction::Zero, base_seed, n, "zero member")?;
    let (zero_est, record) = correlation_estimate(cfg, rec, &zero, "d2[zero member]", "zero_member")?;
    drop(zero);
    let record = record.with_reference("D1 of the uncoupled measure", d1, Some(tol));
    if cfg.include_zero_member.unwrap_or(true) {
        rec.check(
            "zero member sits at D1, below D_L",
            record.within_tolerance == Some(true),
            fmt_check(zero_est.value, d1, tol),
        );
        rec.estimate(record);
    }

    let mut probes = Csv::new(&["lambda", "d2", "d2_stderr", "reference", "within_tolerance"]);
    for (i, &lambda) in lambdas.iter().enumerate() {
        let g = CouplingFunction::Zero.plus_scaled(lambda, make_probe());
        let quantity = format!("d2[zero member + {lambda} * probe]");
        let (record, reference, label) = if lambda == 0.0 {
            let mut r = Estimate::new(quantity, zero_est.value);
            r.stderr = Some(zero_est.slope_stderr);
            (r, zero_est.value, "zero member")
        } else {
            let cloud = sample_cloud(p, &g, base_seed, n, &format!("probe lambda = {lambda}"))?;
            (correlation_estimate(cfg, rec, &cloud, &quantity, &format!("probe_{i:02}"))?.1, dl, "D_L")
        };
        let record = record.with_reference(label, reference, Some(tol));
        let ok = record.within_tolerance == Some(true);
        let value = record.value;
        probes.push(vec![
            lambda.into(),
            value.into(),
            record.stderr.unwrap_or(f64::NAN).into(),
            reference.into(),
            ok.into(),
        ]);
        rec.check(format!("probe lambda = {lambda}"), ok, fmt_check(value, reference, tol));
        rec.estimate(record);
    }
    if !lambdas.is_empty() {
        rec.emit_csv("prevalence_probes.csv", &probes)?;
    }
    Ok(())
}
