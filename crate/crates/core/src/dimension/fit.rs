use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{linear_fit, theil_sen_slope};

/// Fewest scales a fit accepts.
pub const MIN_SCALES: usize = 4;

/// OLS fits with `r²` below this switch to the Theil-Sen slope.
pub const THEIL_SEN_R2: f64 = 0.9;

/// Closed range of scales `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleWindow {
    pub min: f64,
    pub max: f64,
}

impl ScaleWindow {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(Error::InvalidWindow { min, max });
        }
        Ok(Self { min, max })
    }

    /// `[2^-k_max, 2^-k_min]`.
    pub fn dyadic(k_min: i32, k_max: i32) -> Result<Self> {
        Self::new(2f64.powi(-k_max), 2f64.powi(-k_min))
    }

    pub fn contains(&self, eps: f64) -> bool {
        eps >= self.min * (1.0 - 1e-12) && eps <= self.max * (1.0 + 1e-12)
    }

    /// Scales `2^(-j/per_octave)` inside the window, ascending.
    pub fn scales(&self, per_octave: usize) -> Vec<f64> {
        let per = per_octave.max(1) as f64;
        let hi = (-self.max.log2() * per).floor() as i64;
        let lo = (-self.min.log2() * per).ceil() as i64;
        let mut out: Vec<f64> = (hi..=lo)
            .rev()
            .map(|j| 2f64.powf(-(j as f64) / per))
            .filter(|e| self.contains(*e))
            .collect();
        out.dedup();
        out
    }

    pub fn halved(&self) -> Self {
        let mid = (self.min.ln() + self.max.ln()) / 2.0;
        let quarter = (self.max.ln() - self.min.ln()) / 4.0;
        Self {
            min: (mid - quarter).exp(),
            max: (mid + quarter).exp(),
        }
    }
}

/// Raw statistic at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleStat {
    pub epsilon: f64,
    /// The quantity regressed on `ln ε` (see [`Transform`]).
    pub statistic: f64,
    /// Occupied cells, pair count or summed ball counts.
    pub count: u64,
}

/// What [`ScaleStat::statistic`] holds and how its slope maps to a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `ln N(ε)`; dimension is minus the slope.
    BoxCount,
    /// `Σ p ln p`.
    Information,
    /// `ln C(ε)`.
    Correlation,
    /// `ln μ̂(B(x, ε))`, possibly averaged over centres.
    Pointwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitMethod {
    LeastSquares,
    TheilSen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub scale_window: (f64, f64),
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub counts: Vec<ScaleStat>,
    /// Scales in the window whose statistic was not finite.
    pub dropped_scales: Vec<f64>,
    pub method: FitMethod,
    pub transform: Transform,
}

/// Fits the slope of the statistic against `ln ε` over the scales in
/// `window`. Non-finite statistics are dropped and reported.
pub fn fit_dimension(stats: &[ScaleStat], transform: Transform, window: ScaleWindow) -> Result<DimensionEstimate> {
    fit_dimension_min_count(stats, transform, window, 0)
}

/// Like [`fit_dimension`], also dropping scales whose count is below
/// `min_count`. A statistic built from a handful of events is mostly noise.
pub fn fit_dimension_min_count(
    stats: &[ScaleStat],
    transform: Transform,
    window: ScaleWindow,
    min_count: u64,
) -> Result<DimensionEstimate> {
    let mut counts: Vec<ScaleStat> = stats.iter().filter(|s| window.contains(s.epsilon)).copied().collect();
    counts.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let (usable, dropped): (Vec<ScaleStat>, Vec<ScaleStat>) = counts.iter().partition(|s| s.statistic.is_finite() && s.count >= min_count);
    if usable.len() < MIN_SCALES {
        return Err(Error::TooFewScales {
            needed: MIN_SCALES,
            got: usable.len(),
        });
    }
    let xs: Vec<f64> = usable.iter().map(|s| s.epsilon.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|s| s.statistic).collect();
    let fit = linear_fit(&xs, &ys).ok_or(Error::TooFewScales {
        needed: MIN_SCALES,
        got: 0,
    })?;
    let (slope, method) = if fit.r_squared < THEIL_SEN_R2 {
        (theil_sen_slope(&xs, &ys).unwrap_or(fit.slope), FitMethod::TheilSen)
    } else {
        (fit.slope, FitMethod::LeastSquares)
    };
    let value = match transform {
        Transform::BoxCount => -slope,
        _ => slope,
    };
    Ok(DimensionEstimate {
        value,
        scale_window: (usable[0].epsilon, usable[usable.len() - 1].epsilon),
        slope_stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        counts,
        dropped_scales: dropped.iter().map(|s| s.epsilon).collect(),
        method,
        transform,
    })
}
