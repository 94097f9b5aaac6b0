use serde::{Deserialize, Serialize};

use crate::stats::Neumaier;

use super::cloud::{dist2, PointCloud};

/// Growth per decade of sample size above which a partial mean counts as
/// growing.
pub const DIVERGENCE_GROWTH: f64 = 1.2;

/// Consecutive growing decades needed to flag divergence.
pub const DIVERGENCE_DECADES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Divergence {
    Convergent,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialMean {
    pub samples: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialEstimate {
    pub s: f64,
    /// Running means of `|x - y|^-s` at 10³, 10⁴, … samples, then the full
    /// cloud.
    pub partial_means: Vec<PartialMean>,
    /// Diagnostic only: a finite sample cannot decide finiteness.
    pub divergence_flag: Divergence,
}

impl PotentialEstimate {
    pub fn mean(&self) -> f64 {
        self.partial_means.last().map_or(f64::NAN, |p| p.mean)
    }
}

/// Monte-Carlo `s`-potential `∫ |x - y|^-s dμ(y)` of the empirical measure.
/// Points coinciding with `x` are skipped.
pub fn s_potential(cloud: &PointCloud, x: &[f64], s: f64) -> PotentialEstimate {
    assert!(s >= 0.0, "s must be nonnegative");
    assert_eq!(x.len(), cloud.dim(), "centre dimension does not match the cloud");
    let mut centre = [0.0; 4];
    centre[..x.len()].copy_from_slice(x);
    let mut acc = Neumaier::default();
    let mut used = 0usize;
    let mut next_mark = 1000usize;
    let mut partial_means = Vec::new();
    for p in cloud.padded() {
        let d2 = dist2(&p, &centre);
        if d2 == 0.0 {
            continue;
        }
        acc.add(d2.powf(-0.5 * s));
        used += 1;
        if used == next_mark {
            partial_means.push(PartialMean {
                samples: used,
                mean: acc.total() / used as f64,
            });
            next_mark *= 10;
        }
    }
    if used > 0 && partial_means.last().map_or(true, |p| p.samples != used) {
        partial_means.push(PartialMean {
            samples: used,
            mean: acc.total() / used as f64,
        });
    }
    let decades: Vec<&PartialMean> = partial_means.iter().filter(|p| p.samples.is_power_of_ten()).collect();
    // longest run of consecutive growing decades anywhere in the sequence;
    // one near-coincident point can dominate a later partial mean and mask
    // growth if only the last decades are inspected
    let mut growing = 0;
    let mut run = 0;
    for w in decades.windows(2) {
        run = if w[1].mean > DIVERGENCE_GROWTH * w[0].mean { run + 1 } else { 0 };
        growing = growing.max(run);
    }
    PotentialEstimate {
        s,
        partial_means,
        divergence_flag: if growing >= DIVERGENCE_DECADES {
            Divergence::Divergent
        } else {
            Divergence::Convergent
        },
    }
}

trait PowerOfTen {
    fn is_power_of_ten(&self) -> bool;
}

impl PowerOfTen for usize {
    fn is_power_of_ten(&self) -> bool {
        let mut n = *self;
        while n >= 10 && n % 10 == 0 {
            n /= 10;
        }
        n == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, unit_f64};

    fn uniform_line(n: usize, seed: u64) -> PointCloud {
        let mut rng = stream(seed, 0);
        PointCloud::new(1, (0..n).map(|_| unit_f64(&mut rng)).collect(), "u").unwrap()
    }

    #[test]
    fn zero_exponent_is_total_mass() {
        let p = s_potential(&uniform_line(20_000, 1), &[0.5], 0.0);
        assert!(p.partial_means.iter().all(|m| m.mean == 1.0));
        assert_eq!(p.divergence_flag, Divergence::Convergent);
        assert_eq!(p.partial_means.iter().map(|m| m.samples).collect::<Vec<_>>(), vec![1000, 10_000, 20_000]);
    }

    #[test]
    fn half_exponent_on_the_line() {
        // 2·(1/2)^(1-s)/(1-s) at s = 1/2
        let want = 2.0 * 0.5f64.sqrt() / 0.5;
        let p = s_potential(&uniform_line(1_000_000, 2), &[0.5], 0.5);
        assert!((p.mean() - want).abs() <= 0.05, "{}", p.mean());
        assert_eq!(p.divergence_flag, Divergence::Convergent);
    }

    #[test]
    fn exponent_above_dimension_diverges() {
        let p = s_potential(&uniform_line(1_000_000, 3), &[0.5], 1.5);
        assert_eq!(p.divergence_flag, Divergence::Divergent, "{:?}", p.partial_means);
    }

    #[test]
    fn nondecreasing_in_s_within_unit_distance() {
        let c = uniform_line(5_000, 4);
        let means: Vec<f64> = [0.0, 0.2, 0.4, 0.6, 0.8].iter().map(|&s| s_potential(&c, &[0.5], s).mean()).collect();
        assert!(means.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn coincident_points_skipped() {
        let c = PointCloud::from_values(&[0.5, 0.5, 0.75], "c").unwrap();
        let p = s_potential(&c, &[0.5], 1.0);
        assert_eq!(p.partial_means, vec![PartialMean { samples: 1, mean: 4.0 }]);
    }
}
