use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cloud::PointCloud;
use super::fit::{fit_dimension, DimensionEstimate, ScaleStat, ScaleWindow, Transform};

/// Scales below this fraction of the data diameter are rejected.
pub const MIN_RELATIVE_SCALE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub epsilon: f64,
    pub occupied: usize,
    /// Empirical cell masses, in cell-key order.
    pub masses: Vec<f64>,
}

impl BoxCount {
    /// `Σ p ln p` over occupied cells.
    pub fn entropy_sum(&self) -> f64 {
        self.masses.iter().map(|p| p * p.ln()).sum()
    }
}

fn cell_keys(cloud: &PointCloud, epsilon: f64, offset: &[f64]) -> Result<Vec<u128>> {
    let diameter = cloud.diameter();
    if !(epsilon > 0.0) || epsilon < MIN_RELATIVE_SCALE * diameter {
        return Err(Error::DegenerateScale { epsilon, diameter });
    }
    let bias = i64::from(i32::MAX);
    cloud
        .points()
        .map(|p| {
            let mut key = 0u128;
            for (k, v) in p.iter().enumerate() {
                let c = ((v - offset.get(k).copied().unwrap_or(0.0)) / epsilon).floor();
                if c.abs() >= bias as f64 {
                    return Err(Error::DegenerateScale { epsilon, diameter });
                }
                key |= ((c as i64 + bias) as u128) << (32 * k);
            }
            Ok(key)
        })
        .collect()
}

/// Cells of side `epsilon` on the grid through `offset` that hold at least
/// one point, with their empirical masses.
pub fn box_count_with_offset(cloud: &PointCloud, epsilon: f64, offset: &[f64]) -> Result<BoxCount> {
    let mut keys = cell_keys(cloud, epsilon, offset)?;
    keys.sort_unstable();
    let n = keys.len() as f64;
    let mut masses = Vec::new();
    let mut run = 1usize;
    for w in keys.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            masses.push(run as f64 / n);
            run = 1;
        }
    }
    masses.push(run as f64 / n);
    Ok(BoxCount {
        epsilon,
        occupied: masses.len(),
        masses,
    })
}

/// Grid anchored at the origin.
pub fn box_count(cloud: &PointCloud, epsilon: f64) -> Result<BoxCount> {
    box_count_with_offset(cloud, epsilon, &[])
}

fn grid_stats(cloud: &PointCloud, window: ScaleWindow, per_octave: usize, transform: Transform) -> Result<Vec<ScaleStat>> {
    window
        .scales(per_octave)
        .into_iter()
        .map(|eps| {
            let b = box_count(cloud, eps)?;
            let statistic = match transform {
                Transform::BoxCount => (b.occupied as f64).ln(),
                _ => b.entropy_sum(),
            };
            Ok(ScaleStat {
                epsilon: eps,
                statistic,
                count: b.occupied as u64,
            })
        })
        .collect()
}

/// Box-counting dimension from dyadic scales in `window`.
pub fn box_dimension(cloud: &PointCloud, window: ScaleWindow) -> Result<DimensionEstimate> {
    box_dimension_with(cloud, window, 1)
}

/// Box-counting dimension over scales `2^(-j/per_octave)`. Finer spacing
/// averages out log-periodic oscillation on self-similar sets.
pub fn box_dimension_with(cloud: &PointCloud, window: ScaleWindow, per_octave: usize) -> Result<DimensionEstimate> {
    let stats = grid_stats(cloud, window, per_octave, Transform::BoxCount)?;
    fit_dimension(&stats, Transform::BoxCount, window)
}

/// Slope of `Σ p ln p` against `ln ε` on dyadic grids.
pub fn information_dimension_grid(cloud: &PointCloud, window: ScaleWindow) -> Result<DimensionEstimate> {
    information_dimension_grid_with(cloud, window, 1)
}

pub fn information_dimension_grid_with(cloud: &PointCloud, window: ScaleWindow, per_octave: usize) -> Result<DimensionEstimate> {
    let stats = grid_stats(cloud, window, per_octave, Transform::Information)?;
    fit_dimension(&stats, Transform::Information, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, unit_f64};

    fn uniform(dim: usize, n: usize, seed: u64) -> PointCloud {
        let mut rng = stream(seed, 0);
        PointCloud::new(dim, (0..n * dim).map(|_| unit_f64(&mut rng)).collect(), "uniform").unwrap()
    }

    #[test]
    fn uniform_interval_fills_ten_cells() {
        let b = box_count(&uniform(1, 100_000, 1), 0.1).unwrap();
        assert_eq!(b.occupied, 10);
        assert!((b.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point() {
        let c = PointCloud::from_values(&[0.3], "one").unwrap();
        for k in 0..30 {
            assert_eq!(box_count(&c, 2f64.powi(-k)).unwrap().occupied, 1);
        }
    }

    #[test]
    fn product_bound() {
        let c = uniform(2, 2_000, 2);
        for eps in [0.3, 0.05, 0.01] {
            let nx = box_count(&c.project(&[0]).unwrap(), eps).unwrap().occupied;
            let ny = box_count(&c.project(&[1]).unwrap(), eps).unwrap().occupied;
            assert!(box_count(&c, eps).unwrap().occupied <= nx * ny);
        }
    }

    #[test]
    fn degenerate_scale_rejected() {
        let c = uniform(2, 100, 3);
        assert!(matches!(box_count(&c, 1e-13), Err(Error::DegenerateScale { .. })));
        assert!(box_count(&c, 0.0).is_err());
    }

    #[test]
    fn point_mass_has_zero_information_dimension() {
        let c = PointCloud::from_values(&[0.25; 1000], "atom").unwrap();
        let d = information_dimension_grid(&c, ScaleWindow::dyadic(2, 10).unwrap()).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn uniform_square_box_dimension() {
        let d = box_dimension(&uniform(2, 100_000, 4), ScaleWindow::dyadic(3, 7).unwrap()).unwrap();
        assert!((d.value - 2.0).abs() <= 0.05, "{}", d.value);
    }

    #[test]
    fn dyadic_counts_nonincreasing_in_scale() {
        let c = uniform(2, 5_000, 5);
        let counts: Vec<usize> = (0..12).map(|k| box_count(&c, 2f64.powi(-k)).unwrap().occupied).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }
}
