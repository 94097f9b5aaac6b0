//! Fixed-radius pair counting with cell lists.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cloud::{dist2, PointCloud};
use super::fit::{fit_dimension_min_count, DimensionEstimate, ScaleStat, ScaleWindow, Transform};

/// Fewest points [`correlation_dimension`] accepts.
pub const MIN_CORRELATION_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOptions {
    /// Largest number of candidate distance checks per scale. When the full
    /// cloud would exceed it, a prefix of the cloud is used instead.
    pub max_checks: u64,
    /// Prefixes never shrink below this many points.
    pub min_points: usize,
    /// Scales per octave inside the window.
    pub per_octave: usize,
    /// Scales with fewer close pairs are left out of the dimension fit.
    pub min_pairs: u64,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            max_checks: 300_000_000,
            min_points: 30_000,
            per_octave: 1,
            min_pairs: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub epsilon: f64,
    /// `#{i < j : |v_i - v_j| < ε}` among the first `points` points.
    pub pairs: u64,
    pub points: usize,
}

impl PairCount {
    /// `C(ε) = 2·pairs / (M(M-1))`.
    pub fn correlation_sum(&self) -> f64 {
        let m = self.points as f64;
        2.0 * self.pairs as f64 / (m * (m - 1.0))
    }
}

const FIELD: u32 = 32;

struct CellList<'a> {
    eps2: f64,
    points: Vec<[f64; 4]>,
    /// (key, start, end) into `points`, sorted by key.
    cells: Vec<(u128, usize, usize)>,
    index: FxHashMap<u128, usize>,
    offsets: &'a [i128],
}

/// Key deltas of the neighbour offsets in `{-1,0,1}^dim` that are
/// lexicographically positive, so each unordered cell pair is visited once.
fn forward_offsets(dim: usize) -> Vec<i128> {
    let total = 3usize.pow(dim as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut digits = [0i128; 4];
        let mut c = code;
        for d in digits.iter_mut().take(dim) {
            *d = (c % 3) as i128 - 1;
            c /= 3;
        }
        let first = digits[..dim].iter().rev().find(|&&d| d != 0);
        if first == Some(&1) {
            out.push(digits[..dim].iter().enumerate().map(|(k, d)| d << (FIELD as usize * k)).sum());
        }
    }
    out
}

impl<'a> CellList<'a> {
    fn build(points: &[[f64; 4]], dim: usize, lo: &[f64], eps: f64, offsets: &'a [i128]) -> Result<Self> {
        let limit = f64::from(u32::MAX / 2);
        let mut keyed = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let mut key = 0u128;
            for k in 0..dim {
                // shifted by one so neighbour offsets never underflow a field
                let c = ((p[k] - lo[k]) / eps).floor() + 1.0;
                if c >= limit {
                    return Err(Error::DegenerateScale {
                        epsilon: eps,
                        diameter: (p[k] - lo[k]).abs(),
                    });
                }
                key |= (c as u128) << (FIELD as usize * k);
            }
            keyed.push((key, i));
        }
        keyed.sort_unstable();
        let sorted: Vec<[f64; 4]> = keyed.iter().map(|&(_, i)| points[i]).collect();
        let mut cells = Vec::new();
        let mut start = 0;
        for i in 1..=keyed.len() {
            if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                cells.push((keyed[start].0, start, i));
                start = i;
            }
        }
        let index = cells.iter().enumerate().map(|(c, &(k, _, _))| (k, c)).collect();
        Ok(Self {
            eps2: eps * eps,
            points: sorted,
            cells,
            index,
            offsets,
        })
    }

    fn neighbours(&self, key: u128) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.offsets.iter().filter_map(move |&o| {
            let k = (key as i128 + o) as u128;
            self.index.get(&k).map(|&c| (self.cells[c].1, self.cells[c].2))
        })
    }

    fn candidates(&self) -> u64 {
        self.cells
            .par_iter()
            .map(|&(key, s, e)| {
                let n = (e - s) as u64;
                n * n.saturating_sub(1) / 2 + self.neighbours(key).map(|(s2, e2)| n * (e2 - s2) as u64).sum::<u64>()
            })
            .sum()
    }

    fn count(&self) -> u64 {
        let pts = &self.points;
        let eps2 = self.eps2;
        self.cells
            .par_iter()
            .map(|&(key, s, e)| {
                let mut n = 0u64;
                for i in s..e {
                    for j in i + 1..e {
                        n += u64::from(dist2(&pts[i], &pts[j]) < eps2);
                    }
                }
                for (s2, e2) in self.neighbours(key) {
                    for a in &pts[s..e] {
                        for b in &pts[s2..e2] {
                            n += u64::from(dist2(a, b) < eps2);
                        }
                    }
                }
                n
            })
            .sum()
    }
}

/// Pair counts at each scale. Integer counts make the result independent of
/// thread scheduling.
pub fn pair_counts(cloud: &PointCloud, scales: &[f64], opts: &PairOptions) -> Result<Vec<PairCount>> {
    if cloud.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: cloud.len(),
        });
    }
    let padded = cloud.padded();
    let (lo, _) = cloud.bounds();
    let offsets = forward_offsets(cloud.dim());
    let diameter = cloud.diameter();
    scales
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return Err(Error::DegenerateScale { epsilon: eps, diameter });
            }
            let mut m = padded.len();
            let mut list = CellList::build(&padded, cloud.dim(), &lo, eps, &offsets)?;
            let floor = opts.min_points.max(2).min(padded.len());
            loop {
                let work = list.candidates();
                if work <= opts.max_checks || m <= floor {
                    break;
                }
                // candidate pairs scale with the square of the prefix length
                let next = ((m as f64 * (opts.max_checks as f64 / work as f64).sqrt()) as usize).max(floor);
                if next >= m {
                    break;
                }
                m = next;
                list = CellList::build(&padded[..m], cloud.dim(), &lo, eps, &offsets)?;
            }
            Ok(PairCount {
                epsilon: eps,
                pairs: list.count(),
                points: m,
            })
        })
        .collect()
}

/// `C(ε)` over the whole cloud, no subsampling.
pub fn correlation_sum(cloud: &PointCloud, epsilon: f64) -> Result<f64> {
    let opts = PairOptions {
        max_checks: u64::MAX,
        ..PairOptions::default()
    };
    Ok(pair_counts(cloud, &[epsilon], &opts)?[0].correlation_sum())
}

/// O(N²) reference count of pairs closer than `epsilon`.
pub fn brute_force_pair_count(cloud: &PointCloud, epsilon: f64) -> u64 {
    let pts = cloud.padded();
    let eps2 = epsilon * epsilon;
    let mut n = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            n += u64::from(dist2(&pts[i], &pts[j]) < eps2);
        }
    }
    n
}

pub fn correlation_dimension_with(cloud: &PointCloud, window: ScaleWindow, opts: &PairOptions) -> Result<DimensionEstimate> {
    if cloud.len() < MIN_CORRELATION_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_CORRELATION_POINTS,
            got: cloud.len(),
        });
    }
    let counts = pair_counts(cloud, &window.scales(opts.per_octave), opts)?;
    let stats: Vec<ScaleStat> = counts
        .iter()
        .map(|c| ScaleStat {
            epsilon: c.epsilon,
            statistic: c.correlation_sum().ln(),
            count: c.pairs,
        })
        .collect();
    fit_dimension_min_count(&stats, Transform::Correlation, window, opts.min_pairs)
}

/// Slope of `ln C(ε)` against `ln ε`.
pub fn correlation_dimension(cloud: &PointCloud, window: ScaleWindow) -> Result<DimensionEstimate> {
    correlation_dimension_with(cloud, window, &PairOptions::default())
}
