//! `(y, w)` cross-section of the attractor over a thin `(x, z)` window,
//! coupled next to uncoupled.

use std::collections::{BTreeMap, BTreeSet};

use bakerdim_core::coupling::SIN_SQ_TANH;
use bakerdim_core::rng::derive_seed;
use bakerdim_core::{CouplingFunction, MeasureSampler, State4};
use serde::{Deserialize, Serialize};

use super::Recorder;
use crate::config::{CouplingKind, ExperimentConfig};
use crate::error::CliResult;
use crate::manifest::Estimate;
use crate::output::Csv;
use crate::plot::{scatter_panels, Panel};

/// Fewer survivors than this triggers an enlarge-window warning.
pub const MIN_SURVIVORS: usize = 500;
/// AC-level threshold on distinct `w` cells within one `y` cell.
pub const MIN_DISTINCT_W_CELLS: usize = 10;
/// `y` cells with fewer points are left out of the between-cell statistic.
const MIN_CELL_POINTS: usize = 10;

/// How `w` spreads within and across `y` cells of side `cell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSpread {
    pub cell: f64,
    pub occupied_y_cells: usize,
    /// Largest number of distinct occupied `w` cells inside one `y` cell.
    pub max_w_cells: usize,
    /// Share of the variance of `w` explained by the `y` cell (between-cell
    /// over total). Near zero for a product, large for a sheared set.
    pub between_share: f64,
}

pub fn w_cell_spread(points: &[(f64, f64)], cell: f64) -> CellSpread {
    let mut cells: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for &(y, w) in points {
        cells.entry((y / cell).floor() as i64).or_default().push(w);
    }
    let max_w_cells = cells
        .values()
        .map(|ws| ws.iter().map(|w| (w / cell).floor() as i64).collect::<BTreeSet<_>>().len())
        .max()
        .unwrap_or(0);
    let kept: Vec<&Vec<f64>> = cells.values().filter(|ws| ws.len() >= MIN_CELL_POINTS).collect();
    let n: usize = kept.iter().map(|ws| ws.len()).sum();
    let between_share = if n < 2 {
        0.0
    } else {
        let mean = kept.iter().flat_map(|ws| ws.iter()).sum::<f64>() / n as f64;
        let total: f64 = kept.iter().flat_map(|ws| ws.iter()).map(|w| (w - mean).powi(2)).sum();
        let between: f64 = kept
            .iter()
            .map(|ws| {
                let m = ws.iter().sum::<f64>() / ws.len() as f64;
                ws.len() as f64 * (m - mean).powi(2)
            })
            .sum();
        if total > 0.0 {
            between / total
        } else {
            0.0
        }
    };
    CellSpread {
        cell,
        occupied_y_cells: cells.len(),
        max_w_cells,
        between_share,
    }
}

fn points_csv(states: &[State4]) -> Csv {
    let mut csv = Csv::new(&["x", "y", "z", "w"]);
    for s in states {
        csv.push(vec![s.x.into(), s.y.into(), s.z.into(), s.w.into()]);
    }
    csv
}

pub(super) fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> CliResult<()> {
    let p = cfg.params()?;
    let g = cfg.coupling_function()?;
    let (x0, z0) = (cfg.window_x.unwrap_or(0.3), cfg.window_z.unwrap_or(0.3));
    let half = cfg.window_width.unwrap_or(0.02) / 2.0;
    let draws = cfg.cross_section_draws.unwrap_or(4_000_000);
    let cell = 2f64.powi(-cfg.cell_log2.unwrap_or(6));
    let accept = move |x: f64, z: f64| (x - x0).abs() <= half && (z - z0).abs() <= half;

    // Both clouds read the same streams, so they share x, y, z point by point.
    let seed = derive_seed(cfg.seed(), "cross-section");
    let coupled = MeasureSampler::coupled_default(p, g.clone()).cloud_filtered(seed, draws, accept);
    let uncoupled = MeasureSampler::uncoupled(p).cloud_filtered(seed, draws, accept);
    rec.note(format!(
        "window |x-{x0}| <= {half}, |z-{z0}| <= {half}; {} of {draws} draws survive",
        coupled.len()
    ));
    if coupled.len() < MIN_SURVIVORS {
        rec.warn(format!(
            "only {} points fall in the (x, z) window (want >= {MIN_SURVIVORS}); enlarge window_width or cross_section_draws",
            coupled.len()
        ));
    }

    rec.emit_csv("cross_section_coupled.csv", &points_csv(&coupled))?;
    rec.emit_csv("cross_section_uncoupled.csv", &points_csv(&uncoupled))?;
    let yw = |v: &[State4]| v.iter().map(|s| (s.y, s.w)).collect::<Vec<_>>();
    let (c_yw, u_yw) = (yw(&coupled), yw(&uncoupled));
    let svg = scatter_panels(
        &format!("(y, w) cross-section, alpha = {}, beta = {}", p.alpha(), p.beta()),
        "y",
        "w",
        &[
            Panel {
                title: &format!("g = {}", g.describe()),
                points: &c_yw,
            },
            Panel {
                title: "g = 0",
                points: &u_yw,
            },
        ],
    );
    rec.emit("cross_section.svg", svg.as_bytes())?;

    let cs = w_cell_spread(&c_yw, cell);
    let us = w_cell_spread(&u_yw, cell);
    let mut spread = Csv::new(&["cloud", "cell", "occupied_y_cells", "max_w_cells", "between_share"]);
    for (name, s) in [("coupled", cs), ("uncoupled", us)] {
        spread.push(vec![
            name.into(),
            s.cell.into(),
            s.occupied_y_cells.into(),
            s.max_w_cells.into(),
            s.between_share.into(),
        ]);
    }
    rec.emit_csv("cross_section_cells.csv", &spread)?;
    rec.estimate(Estimate::new("max_w_cells_in_one_y_cell_coupled", cs.max_w_cells as f64));
    rec.estimate(Estimate::new("max_w_cells_in_one_y_cell_uncoupled", us.max_w_cells as f64));
    rec.estimate(Estimate::new("between_y_cell_variance_share_coupled", cs.between_share));
    rec.estimate(Estimate::new("between_y_cell_variance_share_uncoupled", us.between_share));

    rec.check(
        "w spread within a y cell",
        cs.max_w_cells >= MIN_DISTINCT_W_CELLS,
        format!(
            "{} distinct w cells of side {cell} in the fullest y cell (need >= {MIN_DISTINCT_W_CELLS})",
            cs.max_w_cells
        ),
    );
    if !g.is_zero() {
        // A product has w independent of y, so the y cell explains almost
        // none of the variance of w; a shear explains a lot.
        rec.check(
            "coupled section is sheared, not a product",
            cs.between_share >= 3.0 * us.between_share && cs.between_share >= 0.05,
            format!(
                "between-cell share of Var(w): coupled {:.4}, uncoupled {:.4}",
                cs.between_share, us.between_share
            ),
        );
    }
    if cfg.coupling == Some(CouplingKind::CohomologousSin2Tanh) {
        let gt = CouplingFunction::Analytic(SIN_SQ_TANH);
        let worst = coupled
            .iter()
            .zip(&uncoupled)
            .map(|(c, u)| (c.w - (u.w + gt.eval(u.x, u.y))).abs())
            .fold(0.0, f64::max);
        let tol = cfg.tolerance_telescoping.unwrap_or(1e-10);
        rec.estimate(Estimate::new("max_shear_residual", worst).with_reference("0", 0.0, Some(tol)));
        rec.check(
            "coupled section equals uncoupled sheared by w + g~(x, y)",
            worst <= tol,
            format!("max residual {worst:.3e} vs tolerance {tol:e}"),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_has_no_between_share() {
        let mut pts = Vec::new();
        for i in 0..64 {
            for j in 0..32 {
                pts.push(((i as f64 + 0.5) / 64.0, (j as f64 + 0.5) / 32.0));
            }
        }
        let s = w_cell_spread(&pts, 1.0 / 64.0);
        assert_eq!(s.occupied_y_cells, 64);
        assert_eq!(s.max_w_cells, 32);
        assert!(s.between_share.abs() < 1e-12);
        let sheared: Vec<_> = pts.iter().map(|&(y, w)| (y, w + 4.0 * y)).collect();
        assert!(w_cell_spread(&sheared, 1.0 / 64.0).between_share > 0.9);
    }
}
