//! Lyapunov spectra: orthogonalized propagation of tangent frames along an
//! orbit, the closed-form exponents of the skew system, and Kaplan-Yorke
//! dimensions.

use std::f64::consts::LN_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingFunction;
use crate::dynamics::{CoupledMap, Params, State4};
use crate::error::{Error, Result};
use crate::orbit::Orbit;
use crate::rng::{derive_indexed, stream};
use crate::stats::Neumaier;

pub const DEFAULT_RENORM_EVERY: usize = 8;

/// Largest change between the last two running estimates that still counts
/// as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;

const MAX_RESTARTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSpectrum {
    /// Exponents in nats per iteration, sorted descending.
    pub values: Vec<f64>,
    pub orbit_length: usize,
    /// Running estimates (sorted) after each renormalization.
    pub convergence_history: Vec<Vec<f64>>,
    /// Restarts caused by the orbit landing on a branch boundary.
    pub restarts: usize,
}

impl ExponentSpectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self {
            values,
            orbit_length: 0,
            convergence_history: Vec::new(),
            restarts: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionValue {
    pub value: f64,
    /// Number of exponents summed.
    pub j_index: usize,
}

/// Starting tangent frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialFrame {
    /// Columns `e_w, e_y, e_x, e_z`. For the skew system the cocycle is upper
    /// triangular in this basis, so the frame is invariant and every
    /// renormalization returns the diagonal exactly.
    StableFirst,
    /// Columns `e_x, e_y, e_z, e_w`.
    Identity,
    /// A random orthonormal frame drawn from the given seed.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    pub renorm_every: usize,
    pub frame: InitialFrame,
    /// Iterations propagated before averaging starts (rounded up to a whole
    /// renormalization block).
    pub warmup: usize,
    /// Seed for the bits refilled into `x` and `z`; derived from the start
    /// when `None`.
    pub refill_seed: Option<u64>,
    pub tolerance: f64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            renorm_every: DEFAULT_RENORM_EVERY,
            frame: InitialFrame::StableFirst,
            warmup: 0,
            refill_seed: None,
            tolerance: CONVERGENCE_TOLERANCE,
        }
    }
}

type Frame = [[f64; 4]; 4];

fn initial_frame(kind: InitialFrame) -> Frame {
    let e = |i: usize| {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    };
    match kind {
        InitialFrame::StableFirst => [e(3), e(1), e(0), e(2)],
        InitialFrame::Identity => [e(0), e(1), e(2), e(3)],
        InitialFrame::Random(seed) => {
            let mut rng = stream(seed, 0);
            let mut cols = [[0.0; 4]; 4];
            for col in cols.iter_mut() {
                for v in col.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            orthonormalize(&mut cols);
            cols
        }
    }
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns the
/// diagonal of `R`.
fn orthonormalize(cols: &mut Frame) -> [f64; 4] {
    let mut r = [0.0; 4];
    for j in 0..4 {
        for _ in 0..2 {
            for i in 0..j {
                let c = dot(&cols[i], &cols[j]);
                for k in 0..4 {
                    cols[j][k] -= c * cols[i][k];
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).sqrt();
        r[j] = norm;
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    r
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Caps the renormalization cadence so that the contracting directions keep
/// about six significant digits after projection against the expanding ones.
fn safe_cadence(map: &CoupledMap, requested: usize) -> usize {
    let c = map.params.alpha().min(map.params.beta());
    let k = ((1e-6 / f64::EPSILON).ln() / (2.0 / c).ln()).floor() as usize;
    requested.min(k.max(1)).max(1)
}

enum Attempt {
    Done(ExponentSpectrum),
    Collision,
}

fn attempt(map: &CoupledMap, start: State4, n_iters: usize, cadence: usize, opts: &LyapunovOptions, seed: u64) -> Result<Attempt> {
    let warmup = opts.warmup.div_ceil(cadence) * cadence;
    let total = warmup + n_iters;
    let mut orbit = Orbit::new(map, start, seed);
    let mut cols = initial_frame(opts.frame);
    let mut sums = [Neumaier::default(); 4];
    let mut history = Vec::with_capacity(n_iters / cadence + 1);
    for t in 0..total {
        let s = orbit.state();
        if s.x == 0.5 || s.z == 0.5 {
            return Ok(Attempt::Collision);
        }
        let jac = map.jacobian(s)?;
        for col in cols.iter_mut() {
            *col = jac.mul_vec(*col);
        }
        orbit.advance();
        let done = t + 1;
        if done % cadence == 0 || done == total {
            let r = orthonormalize(&mut cols);
            if done > warmup {
                let counted = (done - warmup) as f64;
                for (acc, ri) in sums.iter_mut().zip(r) {
                    acc.add(ri.ln());
                }
                history.push(sorted_desc(sums.iter().map(|a| a.total() / counted).collect()));
            }
        }
    }
    let values = sorted_desc(sums.iter().map(|a| a.total() / n_iters as f64).collect());
    if let [.., prev, last] = history.as_slice() {
        let delta = prev.iter().zip(last).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if delta > opts.tolerance {
            return Err(Error::NotConverged { delta, values });
        }
    }
    Ok(Attempt::Done(ExponentSpectrum {
        values,
        orbit_length: n_iters,
        convergence_history: history,
        restarts: 0,
    }))
}

/// Lyapunov spectrum of any coupled map, including two-way coupling.
pub fn lyapunov_spectrum(map: &CoupledMap, start: State4, n_iters: usize, opts: &LyapunovOptions) -> Result<ExponentSpectrum> {
    if n_iters == 0 {
        return Err(Error::InvalidArgument("n_iters must be positive".into()));
    }
    if opts.renorm_every == 0 {
        return Err(Error::InvalidArgument("renorm_every must be positive".into()));
    }
    let cadence = safe_cadence(map, opts.renorm_every);
    let base_seed = opts
        .refill_seed
        .unwrap_or_else(|| start.x.to_bits() ^ start.z.to_bits().rotate_left(17));
    let mut s = start;
    for restarts in 0..=MAX_RESTARTS {
        let seed = derive_indexed(base_seed, "lyapunov-refill", restarts as u64);
        if let Attempt::Done(mut spectrum) = attempt(map, s, n_iters, cadence, opts, seed)? {
            spectrum.restarts = restarts;
            return Ok(spectrum);
        }
        let nudge = (restarts + 1) as f64 * 2f64.powi(-30);
        s = State4::new((s.x + nudge).fract(), s.y, (s.z + nudge).fract(), s.w);
    }
    Err(Error::OnBranchBoundary { x: s.x, z: s.z })
}

/// Spectrum of the skew system `f = 0` from `start`.
pub fn lyapunov_numerical(
    p: &Params,
    g: &CouplingFunction,
    start: State4,
    n_iters: usize,
    renorm_every: usize,
) -> Result<ExponentSpectrum> {
    let map = CoupledMap::skew(*p, g.clone());
    let opts = LyapunovOptions {
        renorm_every,
        ..LyapunovOptions::default()
    };
    lyapunov_spectrum(&map, start, n_iters, &opts)
}

/// `{log 2, log 2, log α, log β}`, sorted.
pub fn lyapunov_exact(p: &Params) -> ExponentSpectrum {
    ExponentSpectrum::from_values(vec![LN_2, LN_2, p.alpha().ln(), p.beta().ln()])
}

/// `{log 2, log c}` for the single baker map with contraction `c`.
pub fn baker_lyapunov_exact(contraction: f64) -> ExponentSpectrum {
    ExponentSpectrum::from_values(vec![LN_2, contraction.ln()])
}

/// Kaplan-Yorke dimension of a descending spectrum. A partial sum of exactly
/// zero counts as nonnegative.
pub fn kaplan_yorke_values(values: &[f64]) -> DimensionValue {
    let d = values.len();
    let mut partial = 0.0;
    let mut j = 0;
    for &v in values {
        if partial + v < 0.0 {
            break;
        }
        partial += v;
        j += 1;
    }
    if j == 0 {
        return DimensionValue { value: 0.0, j_index: 0 };
    }
    if j == d {
        return DimensionValue {
            value: d as f64,
            j_index: d,
        };
    }
    DimensionValue {
        value: j as f64 + partial / values[j].abs(),
        j_index: j,
    }
}

pub fn kaplan_yorke(spectrum: &ExponentSpectrum) -> DimensionValue {
    kaplan_yorke_values(&spectrum.values)
}

/// Closed-form Lyapunov dimension of the skew system.
pub fn dl_uncoupled_closed_form(p: &Params) -> DimensionValue {
    let (a, b) = if p.alpha() <= p.beta() {
        (p.alpha(), p.beta())
    } else {
        (p.beta(), p.alpha())
    };
    if b < 0.25 {
        DimensionValue {
            value: 2.0 - 2.0 * LN_2 / b.ln(),
            j_index: 2,
        }
    } else {
        DimensionValue {
            value: 3.0 - 2.0 * LN_2 / a.ln() - b.ln() / a.ln(),
            j_index: 3,
        }
    }
}

/// `2 − log 2/log α − log 2/log β`: box-counting, information and pointwise
/// dimension of the uncoupled measure.
pub fn d1_uncoupled_closed_form(p: &Params) -> f64 {
    2.0 - LN_2 / p.alpha().ln() - LN_2 / p.beta().ln()
}
