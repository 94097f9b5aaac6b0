use serde::{Deserialize, Serialize};

use crate::coupling::CouplingFunction;
use crate::dynamics::Params;
use crate::rng::stream;
use crate::stats::{linear_fit, LineFit};

use super::cantor::Digits;
use super::conjugacy::series_from_digits;
use super::sampler::MeasureSampler;

/// Hölder exponent of the conjugacy in `y`: 1 when `α >= β`,
/// `log β / log α` otherwise.
pub fn holder_exponent(p: &Params) -> f64 {
    if p.alpha() >= p.beta() {
        1.0
    } else {
        p.beta().ln() / p.alpha().ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusConfig {
    /// Index of the first differing `y` digit at the coarsest scale. The
    /// ratio approaches its limit like `(min(α,β)/max(α,β))^k`, so starting
    /// too coarse biases the slope.
    pub first_digit: usize,
    /// How many decades of `|Δy|` the scales span.
    pub decades: f64,
    pub pairs_per_scale: usize,
    /// Exponent used in the reported ratios; `None` uses [`holder_exponent`].
    pub exponent: Option<f64>,
    pub seed: u64,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        Self {
            first_digit: 8,
            decades: 4.0,
            pairs_per_scale: 1000,
            exponent: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    /// Pairs share `y` digits `0..digit` and differ at `digit`.
    pub digit: usize,
    pub pairs: usize,
    pub max_dy: f64,
    pub max_dh: f64,
    /// `max |Δh_w| / |Δy|^exponent` over the pairs at this scale.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub exponent: f64,
    pub rows: Vec<ModulusRow>,
    /// Fit of `ln max|Δh_w|` against `ln max|Δy|`; `None` when every
    /// `Δh_w` vanishes.
    pub fit: Option<LineFit>,
}

/// Empirical continuity modulus of the conjugacy in the `y` direction.
///
/// Pairs agree in `x`, `z`, `w` and in a prefix of the `y` digits, so
/// `Δh_w` is the difference of the two conjugacy series alone.
pub fn empirical_modulus(p: &Params, g: &CouplingFunction, cfg: &ModulusConfig) -> ModulusTable {
    let exponent = cfg.exponent.unwrap_or_else(|| holder_exponent(p));
    let sampler = MeasureSampler::coupled_default(*p, g.clone());
    let depth = sampler.truncation_depth();
    let span = (cfg.decades * std::f64::consts::LN_10 / -p.alpha().ln()).ceil() as usize;
    let mut rows = Vec::with_capacity(span + 1);
    for digit in cfg.first_digit..=cfg.first_digit + span {
        let mut row = ModulusRow {
            digit,
            pairs: 0,
            max_dy: 0.0,
            max_dh: 0.0,
            max_ratio: 0.0,
        };
        for i in 0..cfg.pairs_per_scale {
            let mut rng = stream(cfg.seed ^ ((digit as u64) << 40), i as u64);
            let v = sampler.draw_uncoupled(&mut rng);
            let mut other: Digits = v.y_digits.clone();
            other.set(digit, !v.y_digits.get(digit));
            let tail = Digits::random(&mut rng, other.len());
            for j in digit + 1..other.len() {
                other.set(j, tail.get(j));
            }
            let y2 = other.cantor_tail(p.alpha(), 0);
            let dy = (v.state.y - y2).abs();
            if dy == 0.0 {
                continue;
            }
            let s1 = series_from_digits(p.alpha(), p.beta(), g, v.state.x, &v.y_digits, depth);
            let s2 = series_from_digits(p.alpha(), p.beta(), g, v.state.x, &other, depth);
            let dh = (s1 - s2).abs();
            row.pairs += 1;
            row.max_dy = row.max_dy.max(dy);
            row.max_dh = row.max_dh.max(dh);
            row.max_ratio = row.max_ratio.max(dh / dy.powf(exponent));
        }
        rows.push(row);
    }
    let usable: Vec<&ModulusRow> = rows.iter().filter(|r| r.max_dh > 0.0 && r.max_dy > 0.0).collect();
    let xs: Vec<f64> = usable.iter().map(|r| r.max_dy.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.max_dh.ln()).collect();
    ModulusTable {
        exponent,
        fit: linear_fit(&xs, &ys),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{cos_sin_coupling, make_probe};

    #[test]
    fn zero_coupling_gives_zero_ratios() {
        let p = Params::new(0.2, 0.3).unwrap();
        let t = empirical_modulus(&p, &CouplingFunction::Zero, &ModulusConfig::default());
        assert!(t.rows.iter().all(|r| r.max_ratio == 0.0 && r.max_dh == 0.0));
        assert!(t.fit.is_none());
    }

    #[test]
    fn holder_regime_slope() {
        let p = Params::new(0.2, 0.3).unwrap();
        let t = empirical_modulus(&p, &make_probe(), &ModulusConfig::default());
        let fit = t.fit.unwrap();
        let rho = 0.3f64.ln() / 0.2f64.ln();
        assert!((fit.slope - rho).abs() <= 0.05, "slope {} vs {rho}", fit.slope);
        let first = t.rows.first().unwrap().max_dy;
        let last = t.rows.last().unwrap().max_dy;
        assert!(first / last >= 1e4);
    }

    #[test]
    fn lipschitz_regime_slope() {
        let p = Params::new(0.3, 0.2).unwrap();
        for g in [make_probe(), cos_sin_coupling()] {
            let t = empirical_modulus(&p, &g, &ModulusConfig::default());
            let fit = t.fit.unwrap();
            assert!(fit.slope >= 0.95, "slope {}", fit.slope);
            assert_eq!(t.exponent, 1.0);
        }
    }
}
