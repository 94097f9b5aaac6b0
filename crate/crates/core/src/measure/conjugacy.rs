use serde::{Deserialize, Serialize};

use crate::coupling::CouplingFunction;
use crate::dynamics::{Params, State2, State4};
use crate::error::Result;

use super::cantor::Digits;
use super::history::{history_from_digits, past_history, y_preimages};

/// Hard cap on the number of series terms.
pub const MAX_TRUNCATION_DEPTH: usize = 2000;

/// Default absolute tolerance for the truncated series.
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-12;

/// Image of the conjugacy together with its certified truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyResult {
    pub image: State4,
    pub truncation_depth: usize,
    /// `‖g‖∞·β^N / (1-β)`; bounds the distance to the untruncated image.
    pub tail_bound: f64,
}

/// Smallest `N` with `‖g‖∞·β^N/(1-β) <= tol`, capped at
/// [`MAX_TRUNCATION_DEPTH`].
pub fn truncation_depth(beta: f64, sup_norm: f64, tol: f64) -> usize {
    let scale = sup_norm.max(f64::MIN_POSITIVE);
    let n = (tol.ln() + (1.0 - beta).ln() - scale.ln()) / beta.ln();
    if !n.is_finite() || n <= 1.0 {
        return 1;
    }
    (n.ceil() as usize).min(MAX_TRUNCATION_DEPTH)
}

pub fn tail_bound(beta: f64, sup_norm: f64, depth: usize) -> f64 {
    sup_norm * beta.powi(depth as i32) / (1.0 - beta)
}

/// `Σ_{i<len} β^i g(history[i])`.
pub fn conjugacy_series(beta: f64, g: &CouplingFunction, history: &[State2]) -> f64 {
    let mut sum = 0.0;
    let mut weight = 1.0;
    for s in history {
        sum += weight * g.eval(s.x, s.y);
        weight *= beta;
    }
    sum
}

/// The series for a drive point given by `x` and the digits of `y`, without
/// materialising the history.
pub(crate) fn series_from_digits(
    alpha: f64,
    beta: f64,
    g: &CouplingFunction,
    x: f64,
    digits: &Digits,
    depth: usize,
) -> f64 {
    if g.is_zero() {
        return 0.0;
    }
    let ys = y_preimages(alpha, digits, depth);
    let mut sum = 0.0;
    let mut weight = 1.0;
    let mut xk = x;
    for (k, &y) in ys.iter().enumerate() {
        xk = if digits.get(k) {
            crate::dynamics::upper_half(xk)
        } else {
            xk / 2.0
        };
        sum += weight * g.eval(xk, y);
        weight *= beta;
    }
    sum
}

/// A point of the uncoupled attractor carried with the digit expansions of
/// its Cantor coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncoupledSample {
    pub state: State4,
    pub y_digits: Digits,
    pub w_digits: Digits,
}

fn shifted(p: &Params, g: &CouplingFunction, s: State4, digits: &Digits, depth: usize, sign: f64) -> ConjugacyResult {
    let depth = depth.min(digits.len().saturating_sub(1));
    let shift = series_from_digits(p.alpha(), p.beta(), g, s.x, digits, depth);
    ConjugacyResult {
        image: State4::new(s.x, s.y, s.z, s.w + sign * shift),
        truncation_depth: depth,
        tail_bound: tail_bound(p.beta(), g.sup_norm(), depth),
    }
}

/// `h_g(x,y,z,w) = (x, y, z, w + Σ β^i g(B_α^{-i-1}(x,y)))`, truncated at
/// `depth` terms (clamped to the available digits).
pub fn conjugacy_map(p: &Params, g: &CouplingFunction, v: &UncoupledSample, depth: usize) -> ConjugacyResult {
    shifted(p, g, v.state, &v.y_digits, depth, 1.0)
}

/// `h_g^{-1}`: subtracts the same series. `y_digits` are the digits of the
/// drive coordinate `y`, which the conjugacy leaves unchanged.
pub fn conjugacy_inverse(
    p: &Params,
    g: &CouplingFunction,
    image: State4,
    y_digits: &Digits,
    depth: usize,
) -> ConjugacyResult {
    shifted(p, g, image, y_digits, depth, -1.0)
}

/// Conjugacy evaluated from a past history reconstructed by inversion
/// rather than from digits. Fails if the history leaves the slab before
/// `depth` steps.
pub fn conjugacy_map_reconstructed(
    p: &Params,
    g: &CouplingFunction,
    s: State4,
    depth: usize,
) -> Result<ConjugacyResult> {
    let history = past_history(p.alpha(), s.drive(), depth)?;
    let shift = conjugacy_series(p.beta(), g, history.entries());
    Ok(ConjugacyResult {
        image: State4::new(s.x, s.y, s.z, s.w + shift),
        truncation_depth: depth,
        tail_bound: tail_bound(p.beta(), g.sup_norm(), depth),
    })
}

/// Materialised history for a sample, mainly for audits and tests.
pub fn sample_history(p: &Params, v: &UncoupledSample, n: usize) -> super::history::PastHistory {
    history_from_digits(p.alpha(), v.state.x, &v.y_digits, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{cos_sin_coupling, make_cohomologous_coupling, SIN_SQ_TANH};
    use crate::dynamics::{coupled_step, CoupledMap};
    use crate::measure::sampler::MeasureSampler;
    use crate::rng::stream;

    #[test]
    fn depth_formula() {
        // ceil(log(1e-12 * 0.57) / log 0.43)
        let n = truncation_depth(0.43, 1.0, 1e-12);
        let want = ((1e-12f64 * 0.57).ln() / 0.43f64.ln()).ceil() as usize;
        assert_eq!(n, want);
        assert!(tail_bound(0.43, 1.0, n) <= 1e-12);
        assert!(tail_bound(0.43, 1.0, n - 1) > 1e-12);
        assert_eq!(truncation_depth(0.4999, 1e308, 1e-308), MAX_TRUNCATION_DEPTH);
        assert_eq!(truncation_depth(0.4, 0.0, 1e-12), 1);
    }

    #[test]
    fn tail_bound_is_geometric() {
        let b: Vec<f64> = (1..10).map(|n| tail_bound(0.3, 2.0, n)).collect();
        for w in b.windows(2) {
            assert!((w[1] / w[0] - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_is_identity() {
        let p = Params::new(0.2, 0.3).unwrap();
        let sampler = MeasureSampler::uncoupled(p);
        let v = sampler.draw_uncoupled(&mut stream(1, 0));
        let r = conjugacy_map(&p, &CouplingFunction::Zero, &v, 40);
        assert_eq!(r.image, v.state);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn inverse_undoes_forward() {
        let p = Params::new(0.4, 0.43).unwrap();
        let g = cos_sin_coupling();
        let depth = truncation_depth(p.beta(), g.sup_norm(), 1e-12);
        let sampler = MeasureSampler::coupled(p, g.clone(), 1e-12);
        for i in 0..1000 {
            let v = sampler.draw_uncoupled(&mut stream(2, i));
            let fwd = conjugacy_map(&p, &g, &v, depth);
            let back = conjugacy_inverse(&p, &g, fwd.image, &v.y_digits, depth);
            let err = (back.image.w - v.state.w).abs();
            assert!(err <= 2.0 * fwd.tail_bound + 1e-14, "err {err}");
            assert_eq!(back.image.y, v.state.y);
        }
    }

    #[test]
    fn conjugates_uncoupled_to_coupled() {
        // h_g(B(v)) = B_g(h_g(v))
        let p = Params::new(0.4, 0.43).unwrap();
        let g = cos_sin_coupling();
        let depth = truncation_depth(p.beta(), g.sup_norm(), 1e-12);
        let sampler = MeasureSampler::coupled(p, g.clone(), 1e-12);
        let plain = CoupledMap::uncoupled(p);
        let coupled = CoupledMap::skew(p, g.clone());
        for i in 0..1000 {
            let v = sampler.draw_uncoupled(&mut stream(3, i));
            let hv = conjugacy_map(&p, &g, &v, depth);
            let lhs_state = plain.step(v.state);
            // digits of B_α(y): push the branch digit (x's leading bit) in front
            let mut bits: Vec<u8> = vec![u8::from(v.state.x >= 0.5)];
            bits.extend(v.y_digits.to_bit_string().bytes().map(|c| c - b'0'));
            let stepped = UncoupledSample {
                state: lhs_state,
                y_digits: Digits::from_bits(&bits),
                w_digits: v.w_digits.clone(),
            };
            let lhs = conjugacy_map(&p, &g, &stepped, depth);
            let rhs = coupled.step(hv.image);
            assert_eq!(lhs.image.x, rhs.x);
            assert!((lhs.image.y - rhs.y).abs() < 1e-15);
            assert!(
                (lhs.image.w - rhs.w).abs() <= 3.0 * hv.tail_bound + 1e-13,
                "{} vs {}",
                lhs.image.w,
                rhs.w
            );
        }
        let _ = coupled_step;
    }

    #[test]
    fn cohomologous_series_telescopes() {
        let p = Params::new(0.1, 0.4).unwrap();
        let gt = CouplingFunction::Analytic(SIN_SQ_TANH);
        let g = make_cohomologous_coupling(&p, gt.clone());
        let depth = truncation_depth(p.beta(), g.sup_norm(), 1e-12);
        let sampler = MeasureSampler::coupled(p, g.clone(), 1e-12);
        for i in 0..1000 {
            let v = sampler.draw_uncoupled(&mut stream(4, i));
            let r = conjugacy_map(&p, &g, &v, depth);
            let shift = r.image.w - v.state.w;
            let want = gt.eval(v.state.x, v.state.y);
            assert!(
                (shift - want).abs() <= gt.sup_norm() * p.beta().powi(depth as i32) + 1e-13,
                "{shift} vs {want}"
            );
        }
    }

    #[test]
    fn reconstructed_history_agrees_for_short_series() {
        let p = Params::new(0.25, 0.2).unwrap();
        let g = cos_sin_coupling();
        let sampler = MeasureSampler::coupled(p, g.clone(), 1e-12);
        let v = sampler.draw_uncoupled(&mut stream(5, 0));
        let a = conjugacy_map(&p, &g, &v, 8);
        let b = conjugacy_map_reconstructed(&p, &g, v.state, 8).unwrap();
        assert!((a.image.w - b.image.w).abs() < 1e-8);
    }
}
