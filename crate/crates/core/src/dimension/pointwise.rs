use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::stats::Neumaier;

use super::cloud::{dist2, PointCloud};
use super::fit::{fit_dimension, DimensionEstimate, ScaleStat, ScaleWindow, Transform};

/// Fewest samples [`pointwise_dimension`] accepts.
pub const MIN_POINTWISE_POINTS: usize = 10_000;

/// Fewest centres for the averaged estimate.
pub const MIN_CENTRES: usize = 50;

fn pad(x: &[f64]) -> [f64; 4] {
    let mut q = [0.0; 4];
    q[..x.len()].copy_from_slice(x);
    q
}

/// Number of points strictly within each scale of `x` (ascending scales),
/// skipping the point at index `skip`.
fn ball_counts(points: &[[f64; 4]], x: &[f64; 4], scales: &[f64], skip: Option<usize>) -> Vec<u64> {
    let eps2: Vec<f64> = scales.iter().map(|e| e * e).collect();
    let mut hist = vec![0u64; scales.len() + 1];
    for (i, p) in points.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d2 = dist2(p, x);
        hist[eps2.partition_point(|&e| e <= d2)] += 1;
    }
    let mut acc = 0;
    hist[..scales.len()]
        .iter()
        .map(|h| {
            acc += h;
            acc
        })
        .collect()
}

fn check(cloud: &PointCloud) -> Result<()> {
    if cloud.len() < MIN_POINTWISE_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_POINTWISE_POINTS,
            got: cloud.len(),
        });
    }
    Ok(())
}

/// Slope of `ln μ̂(B(x, ε))` against `ln ε` for the empirical measure.
pub fn pointwise_dimension(cloud: &PointCloud, x: &[f64], window: ScaleWindow) -> Result<DimensionEstimate> {
    check(cloud)?;
    if x.len() != cloud.dim() {
        return Err(Error::InvalidArgument("centre dimension does not match the cloud".into()));
    }
    let scales = window.scales(1);
    let counts = ball_counts(&cloud.padded(), &pad(x), &scales, None);
    let n = cloud.len() as f64;
    let stats: Vec<ScaleStat> = scales
        .iter()
        .zip(&counts)
        .map(|(&epsilon, &c)| ScaleStat {
            epsilon,
            statistic: (c as f64 / n).ln(),
            count: c,
        })
        .collect();
    fit_dimension(&stats, Transform::Pointwise, window)
}

/// Pointwise dimension averaged over `centres` sample points drawn from the
/// cloud itself: the mean of `ln μ̂(B(x, ε))` over centres, regressed on
/// `ln ε`. Each centre is left out of its own ball. A scale where any ball is
/// empty is dropped.
pub fn averaged_pointwise_dimension(
    cloud: &PointCloud,
    window: ScaleWindow,
    centres: usize,
    seed: u64,
) -> Result<DimensionEstimate> {
    use rand::Rng;
    check(cloud)?;
    if centres < MIN_CENTRES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_CENTRES} centres")));
    }
    let pts = cloud.padded();
    let scales = window.scales(1);
    let mut rng = stream(seed, 0);
    let picks: Vec<usize> = (0..centres).map(|_| rng.gen_range(0..pts.len())).collect();
    let per_centre: Vec<Vec<u64>> = picks
        .par_iter()
        .map(|&i| ball_counts(&pts, &pts[i], &scales, Some(i)))
        .collect();
    let others = (pts.len() - 1) as f64;
    let stats: Vec<ScaleStat> = scales
        .iter()
        .enumerate()
        .map(|(k, &epsilon)| {
            let mut acc = Neumaier::default();
            let mut total = 0;
            for c in &per_centre {
                acc.add((c[k] as f64 / others).ln());
                total += c[k];
            }
            ScaleStat {
                epsilon,
                statistic: acc.total() / centres as f64,
                count: total,
            }
        })
        .collect();
    fit_dimension(&stats, Transform::Pointwise, window)
}
