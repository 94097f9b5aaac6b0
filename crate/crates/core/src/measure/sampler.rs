use rand::RngCore;
use rayon::prelude::*;

use crate::coupling::CouplingFunction;
use crate::dynamics::{CoupledMap, Params, State4};
use crate::orbit::Orbit;
use crate::rng::{derive_indexed, stream, unit_f64};
use crate::stats::{MeanEstimate, Neumaier};

use super::cantor::{precision_depth, Digits};
use super::conjugacy::{series_from_digits, truncation_depth, UncoupledSample, DEFAULT_SERIES_TOLERANCE};

/// Exact sampler for the physical measure `μ_g = h_g(μ)`.
///
/// Each draw takes `x, z` uniform and `y, w` from the Cantor measures via
/// their digit expansions, then pushes the point through the truncated
/// conjugacy. Draw `i` under `seed` always reads stream `(seed, i)`.
#[derive(Debug, Clone)]
pub struct MeasureSampler {
    params: Params,
    g: CouplingFunction,
    depth: usize,
    y_digits: usize,
    w_digits: usize,
}

impl MeasureSampler {
    pub fn uncoupled(params: Params) -> Self {
        Self::with_depth(params, CouplingFunction::Zero, 0)
    }

    /// Coupled sampler with series tolerance `tol` (truncation depth from the
    /// tail bound).
    pub fn coupled(params: Params, g: CouplingFunction, tol: f64) -> Self {
        let depth = if g.is_zero() {
            0
        } else {
            truncation_depth(params.beta(), g.sup_norm(), tol)
        };
        Self::with_depth(params, g, depth)
    }

    pub fn coupled_default(params: Params, g: CouplingFunction) -> Self {
        Self::coupled(params, g, DEFAULT_SERIES_TOLERANCE)
    }

    pub fn with_depth(params: Params, g: CouplingFunction, depth: usize) -> Self {
        Self {
            params,
            depth,
            y_digits: depth + precision_depth(params.alpha()),
            w_digits: precision_depth(params.beta()),
            g,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn coupling(&self) -> &CouplingFunction {
        &self.g
    }

    pub fn truncation_depth(&self) -> usize {
        self.depth
    }

    pub fn tail_bound(&self) -> f64 {
        super::conjugacy::tail_bound(self.params.beta(), self.g.sup_norm(), self.depth)
    }

    fn finish_uncoupled(&self, x: f64, z: f64, rng: &mut impl RngCore) -> UncoupledSample {
        let y_digits = Digits::random(rng, self.y_digits);
        let w_digits = Digits::random(rng, self.w_digits);
        let y = y_digits.cantor_tail(self.params.alpha(), 0);
        let w = w_digits.cantor_tail(self.params.beta(), 0);
        UncoupledSample {
            state: State4::new(x, y, z, w),
            y_digits,
            w_digits,
        }
    }

    /// A point of `μ = μ_α × μ_β` with its digit expansions.
    pub fn draw_uncoupled(&self, rng: &mut impl RngCore) -> UncoupledSample {
        let x = unit_f64(rng);
        let z = unit_f64(rng);
        self.finish_uncoupled(x, z, rng)
    }

    fn push_forward(&self, v: &UncoupledSample) -> State4 {
        let shift = series_from_digits(
            self.params.alpha(),
            self.params.beta(),
            &self.g,
            v.state.x,
            &v.y_digits,
            self.depth,
        );
        State4::new(v.state.x, v.state.y, v.state.z, v.state.w + shift)
    }

    /// A point of `μ_g`.
    pub fn draw(&self, rng: &mut impl RngCore) -> State4 {
        let v = self.draw_uncoupled(rng);
        self.push_forward(&v)
    }

    /// Like [`draw`](Self::draw) but rejects on `(x, z)` before doing any
    /// further work. Consumes the same stream prefix as `draw`, so accepted
    /// points equal the corresponding unconditioned draws.
    pub fn draw_if(&self, rng: &mut impl RngCore, accept: impl Fn(f64, f64) -> bool) -> Option<State4> {
        let x = unit_f64(rng);
        let z = unit_f64(rng);
        if !accept(x, z) {
            return None;
        }
        let v = self.finish_uncoupled(x, z, rng);
        Some(self.push_forward(&v))
    }

    pub fn sample(&self, seed: u64, index: u64) -> State4 {
        self.draw(&mut stream(seed, index))
    }

    /// `n` draws in index order; identical for any worker count.
    pub fn cloud(&self, seed: u64, n: usize) -> Vec<[f64; 4]> {
        (0..n as u64)
            .into_par_iter()
            .map(|i| self.sample(seed, i).to_array())
            .collect()
    }

    /// Draws among the first `n` indices whose `(x, z)` pass `accept`.
    pub fn cloud_filtered(
        &self,
        seed: u64,
        n: usize,
        accept: impl Fn(f64, f64) -> bool + Sync,
    ) -> Vec<State4> {
        (0..n as u64)
            .into_par_iter()
            .filter_map(|i| self.draw_if(&mut stream(seed, i), &accept))
            .collect()
    }
}

/// One draw of `μ` with `depth` Cantor digits per coordinate.
pub fn sample_uncoupled_measure(p: &Params, rng: &mut impl RngCore, depth: usize) -> UncoupledSample {
    let x = unit_f64(rng);
    let z = unit_f64(rng);
    let y_digits = Digits::random(rng, depth);
    let w_digits = Digits::random(rng, depth);
    UncoupledSample {
        state: State4::new(
            x,
            y_digits.cantor_tail(p.alpha(), 0),
            z,
            w_digits.cantor_tail(p.beta(), 0),
        ),
        y_digits,
        w_digits,
    }
}

/// One draw of `μ_g` using a conjugacy series of `depth` terms.
pub fn sample_coupled_measure(p: &Params, g: &CouplingFunction, rng: &mut impl RngCore, depth: usize) -> State4 {
    MeasureSampler::with_depth(*p, g.clone(), depth).draw(rng)
}

/// Orbit-based sampler used to cross-check the pushforward construction:
/// each draw runs an independent orbit from a uniform start in the
/// absorbing box and keeps the state after the transient.
#[derive(Debug, Clone)]
pub struct OrbitSampler {
    map: CoupledMap,
    transient: usize,
}

impl OrbitSampler {
    pub const DEFAULT_TRANSIENT: usize = 100;

    pub fn new(map: CoupledMap) -> Self {
        Self {
            map,
            transient: Self::DEFAULT_TRANSIENT,
        }
    }

    pub fn with_transient(mut self, transient: usize) -> Self {
        self.transient = transient;
        self
    }

    pub fn sample(&self, seed: u64, index: u64) -> State4 {
        let mut rng = stream(seed, index);
        let bounds = self.map.absorbing_bounds(0.0);
        let start = State4::new(
            unit_f64(&mut rng),
            bounds.y.lo + bounds.y.width() * unit_f64(&mut rng),
            unit_f64(&mut rng),
            bounds.w.lo + bounds.w.width() * unit_f64(&mut rng),
        );
        let mut orbit = Orbit::new(&self.map, start, derive_indexed(seed, "orbit-refill", index));
        orbit.discard(self.transient);
        orbit.state()
    }

    pub fn cloud(&self, seed: u64, n: usize) -> Vec<[f64; 4]> {
        (0..n as u64)
            .into_par_iter()
            .map(|i| self.sample(seed, i).to_array())
            .collect()
    }
}

/// Time average of `phi` along one orbit of length `n` after `transient`
/// steps, with a batch-means standard error over `batches` blocks.
pub fn birkhoff_average(
    map: &CoupledMap,
    start: State4,
    refill_seed: u64,
    transient: usize,
    n: usize,
    batches: usize,
    phi: impl Fn(&State4) -> f64,
) -> MeanEstimate {
    let mut orbit = Orbit::new(map, start, refill_seed);
    orbit.discard(transient);
    let per = (n / batches).max(1);
    let means: Vec<f64> = (0..batches)
        .map(|_| {
            let mut acc = Neumaier::default();
            for _ in 0..per {
                acc.add(phi(&orbit.advance()));
            }
            acc.total() / per as f64
        })
        .collect();
    MeanEstimate::from_samples(&means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::cos_sin_coupling;
    use std::f64::consts::PI;

    #[test]
    fn uncoupled_marginals() {
        let p = Params::new(0.25, 0.3).unwrap();
        let cloud = MeasureSampler::uncoupled(p).cloud(1, 100_000);
        let mean = |k: usize| cloud.iter().map(|v| v[k]).sum::<f64>() / cloud.len() as f64;
        assert!((mean(0) - 0.5).abs() < 0.005);
        assert!((mean(2) - 0.5).abs() < 0.005);
        assert!((mean(1) - 0.5).abs() < 0.01);
        assert!((mean(3) - 0.5).abs() < 0.01);
        assert!(cloud.iter().all(|v| (0.0..=1.0).contains(&v[1]) && (0.0..=1.0).contains(&v[3])));
        assert!(cloud.iter().all(|v| v[1] <= 0.25 || v[1] >= 0.75));
    }

    #[test]
    fn free_function_samplers() {
        let p = Params::new(0.25, 0.3).unwrap();
        let v = sample_uncoupled_measure(&p, &mut stream(2, 0), 40);
        assert!((0.0..=1.0).contains(&v.state.y) && (0.0..=1.0).contains(&v.state.w));
        let zero = sample_coupled_measure(&p, &CouplingFunction::Zero, &mut stream(3, 0), 30);
        let plain = MeasureSampler::uncoupled(p).draw(&mut stream(3, 0));
        assert_eq!(zero.x, plain.x);
        assert_eq!(zero.z, plain.z);
    }

    #[test]
    fn zero_coupling_matches_uncoupled() {
        let p = Params::new(0.2, 0.3).unwrap();
        let a = MeasureSampler::uncoupled(p).cloud(9, 1000);
        let b = MeasureSampler::coupled_default(p, CouplingFunction::Zero).cloud(9, 1000);
        assert_eq!(a, b);
    }

    #[test]
    fn filtered_draws_are_a_subset() {
        let p = Params::new(0.4, 0.43).unwrap();
        let s = MeasureSampler::coupled_default(p, cos_sin_coupling());
        let all = s.cloud(5, 5000);
        let sub = s.cloud_filtered(5, 5000, |x, z| x < 0.3 && z > 0.6);
        let want: Vec<State4> = all
            .iter()
            .filter(|v| v[0] < 0.3 && v[2] > 0.6)
            .map(|v| State4::from_array(*v))
            .collect();
        assert_eq!(sub, want);
    }

    #[test]
    fn samples_stay_in_absorbing_box() {
        let p = Params::new(0.4, 0.43).unwrap();
        let g = cos_sin_coupling();
        let v = CoupledMap::skew(p, g.clone()).absorbing_bounds(1e-9);
        let s = MeasureSampler::coupled_default(p, g);
        for pt in s.cloud(3, 20_000) {
            assert!(v.contains(&State4::from_array(pt)));
        }
    }

    fn test_functions() -> Vec<Box<dyn Fn(&State4) -> f64 + Sync>> {
        vec![
            Box::new(|s| (2.0 * PI * s.x).cos() * s.w),
            Box::new(|s| s.w),
            Box::new(|s| s.w * s.w),
            Box::new(|s| s.y * s.w),
            Box::new(|s| (PI * s.w).sin()),
            Box::new(|s| (2.0 * PI * s.z).sin() * s.w),
            Box::new(|s| (s.x * s.w).tanh()),
            Box::new(|s| (-(s.w - 0.5).powi(2)).exp() * s.y),
        ]
    }

    #[test]
    fn pushforward_agrees_with_orbit_sampling() {
        let p = Params::new(0.3, 0.4).unwrap();
        let g = cos_sin_coupling();
        let push = MeasureSampler::coupled_default(p, g.clone()).cloud(11, 40_000);
        let orbit = OrbitSampler::new(CoupledMap::skew(p, g)).cloud(12, 40_000);
        for (k, phi) in test_functions().iter().enumerate() {
            let a: Vec<f64> = push.iter().map(|v| phi(&State4::from_array(*v))).collect();
            let b: Vec<f64> = orbit.iter().map(|v| phi(&State4::from_array(*v))).collect();
            let ea = MeanEstimate::from_samples(&a);
            let eb = MeanEstimate::from_samples(&b);
            let combined = (ea.stderr.powi(2) + eb.stderr.powi(2)).sqrt();
            assert!(
                (ea.mean - eb.mean).abs() <= 4.0 * combined,
                "test function {k}: {} vs {} (se {combined})",
                ea.mean,
                eb.mean
            );
        }
    }

    #[test]
    fn birkhoff_average_matches_space_average() {
        let p = Params::new(0.4, 0.43).unwrap();
        let g = cos_sin_coupling();
        let map = CoupledMap::skew(p, g.clone());
        let phi = |s: &State4| (2.0 * PI * s.x).cos() * s.w;
        let time = birkhoff_average(&map, State4::new(0.3, 0.2, 0.8, 0.1), 77, 100, 400_000, 40, phi);
        let space: Vec<f64> = MeasureSampler::coupled_default(p, g)
            .cloud(13, 100_000)
            .iter()
            .map(|v| phi(&State4::from_array(*v)))
            .collect();
        let space = MeanEstimate::from_samples(&space);
        let se = (time.stderr.powi(2) + space.stderr.powi(2)).sqrt();
        assert!(
            (time.mean - space.mean).abs() <= 3.0 * se,
            "time {} ± {} vs space {} ± {}",
            time.mean,
            time.stderr,
            space.mean,
            space.stderr
        );
    }
}
