//! `D_1` and `D_L` of the uncoupled measure along a `β` grid at fixed `α`.

use bakerdim_core::rng::derive_indexed;
use bakerdim_core::{d1_uncoupled_closed_form, dl_uncoupled_closed_form, CouplingFunction, Params};

use super::{correlation_estimate, sample_cloud, Recorder};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::Estimate;
use crate::output::{Cell, Csv};
use crate::plot::{line_chart, Series};

/// Where the `D_L` formula changes branch.
pub const SEAM: f64 = 0.25;
const EXACT: f64 = 1e-12;

/// `lo, lo+step, ..., <= hi`, with `α` and the seam inserted when they fall
/// inside the range.
pub fn beta_grid(lo: f64, hi: f64, step: f64, alpha: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    for special in [alpha, SEAM] {
        if special >= lo && special <= hi {
            grid.retain(|b| (b - special).abs() > 1e-9);
            grid.push(special);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid
}

pub(super) fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> CliResult<()> {
    let alpha = cfg.alpha.ok_or_else(|| CliError::Config("alpha missing".into()))?;
    let grid = beta_grid(
        cfg.beta_min.unwrap_or(0.01),
        cfg.beta_max.unwrap_or(0.49),
        cfg.beta_step.unwrap_or(0.01),
        alpha,
    );
    let with_d2 = cfg.sweep_d2.unwrap_or(false);
    let mut header = vec!["beta", "d1", "dl", "dl_j_index"];
    if with_d2 {
        header.extend(["d2", "d2_stderr"]);
    }
    let mut table = Csv::new(&header);
    let (mut d1_curve, mut dl_curve, mut d2_curve) = (Vec::new(), Vec::new(), Vec::new());
    let mut ordering_ok = true;
    let mut worst_gap = f64::INFINITY;
    for (k, &beta) in grid.iter().enumerate() {
        let p = Params::new(alpha, beta)?;
        let d1 = d1_uncoupled_closed_form(&p);
        let dl = dl_uncoupled_closed_form(&p);
        ordering_ok &= d1 <= dl.value + EXACT;
        if beta != alpha {
            worst_gap = worst_gap.min(dl.value - d1);
        }
        let mut row: Vec<Cell> = vec![beta.into(), d1.into(), dl.value.into(), dl.j_index.into()];
        if with_d2 {
            let n = cfg.samples.unwrap_or(200_000);
            let cloud = sample_cloud(p, &CouplingFunction::Zero, derive_indexed(cfg.seed(), "sweep", k as u64), n, "sweep")?;
            let (est, record) = correlation_estimate(cfg, rec, &cloud, &format!("d2[beta={beta}]"), &format!("sweep_{k:03}"))?;
            rec.estimate(record.with_reference("D1 closed form", d1, cfg.tolerance_dimension));
            row.extend([est.value.into(), est.slope_stderr.into()]);
            d2_curve.push((beta, est.value));
        }
        table.push(row);
        d1_curve.push((beta, d1));
        dl_curve.push((beta, dl.value));
    }
    rec.emit_csv("sweep.csv", &table)?;
    let mut series = vec![
        Series {
            label: "D1 (closed form)",
            points: &d1_curve,
        },
        Series {
            label: "D_L (closed form)",
            points: &dl_curve,
        },
    ];
    if with_d2 {
        series.push(Series {
            label: "D2 (estimated)",
            points: &d2_curve,
        });
    }
    let svg = line_chart(
        &format!("Dimensions of the uncoupled measure, alpha = {alpha}"),
        "beta",
        "dimension",
        &series,
        &[(alpha, "beta = alpha"), (SEAM, "beta = 1/4")],
    );
    rec.emit("sweep.svg", svg.as_bytes())?;

    rec.check(
        "D1 <= D_L on every row",
        ordering_ok,
        format!("{} rows", grid.len()),
    );
    if grid.len() > 1 {
        rec.check(
            "D1 < D_L away from beta = alpha",
            worst_gap > 0.0,
            format!("smallest D_L - D1 off the diagonal {worst_gap:.3e}"),
        );
    }

    let pa = Params::new(alpha, alpha)?;
    let (d1a, dla) = (d1_uncoupled_closed_form(&pa), dl_uncoupled_closed_form(&pa).value);
    rec.estimate(Estimate::new("D1 at beta = alpha", d1a));
    rec.estimate(Estimate::new("D_L at beta = alpha", dla).with_reference("D1 at beta = alpha", d1a, Some(EXACT)));
    rec.check(
        "tangency D1 = D_L at beta = alpha",
        (d1a - dla).abs() <= EXACT,
        format!("D1 {d1a:.12}, D_L {dla:.12}"),
    );

    if alpha != SEAM {
        let h = 1e-7;
        let at = |b: f64| Params::new(alpha, b).map(|p| dl_uncoupled_closed_form(&p).value);
        let (left, mid, right) = (at(SEAM - h)?, at(SEAM)?, at(SEAM + h)?);
        let (left2, right2) = (at(SEAM - 2.0 * h)?, at(SEAM + 2.0 * h)?);
        let slope_left = (left - left2) / h;
        let slope_right = (right2 - right) / h;
        rec.estimate(Estimate::new("D_L at beta = 1/4", mid).with_reference("3", 3.0, Some(EXACT)));
        rec.estimate(Estimate::new("D_L slope just below beta = 1/4", slope_left));
        rec.estimate(Estimate::new("D_L slope just above beta = 1/4", slope_right));
        rec.check(
            "D_L = 3 and continuous at beta = 1/4",
            (mid - 3.0).abs() <= EXACT && (left - 3.0).abs() < 1e-5 && (right - 3.0).abs() < 1e-5,
            format!("D_L(1/4 - h) = {left:.9}, D_L(1/4) = {mid:.12}, D_L(1/4 + h) = {right:.9}"),
        );
        rec.check(
            "kink at beta = 1/4",
            (slope_left - slope_right).abs() > 0.1,
            format!("one-sided slopes {slope_left:.4} and {slope_right:.4}"),
        );
    }
    if with_d2 {
        rec.note("d2 rows sample the uncoupled measure; every D_q equals D1 there, so D1 is their reference");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_specials() {
        let g = beta_grid(0.01, 0.49, 0.01, 0.05);
        assert_eq!(g.len(), 49);
        assert!(g.contains(&0.05));
        assert!(g.contains(&0.25));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let g = beta_grid(0.1, 0.2, 0.05, 0.123);
        assert_eq!(g, vec![0.1, 0.123, 0.15000000000000002, 0.2]);
    }
}
