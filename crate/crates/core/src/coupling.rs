//! Bounded C¹ coupling functions `g(x, y)`.
//!
//! Every variant exposes its value, its exact gradient, and conservative
//! bounds on `‖g‖∞` and `Lip g`. Values are immutable once built and can be
//! shared freely across worker threads.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{baker_step, Params, State2};
use crate::error::{Error, Result};

/// Largest frequency accepted by [`TrigSeries`].
pub const MAX_FREQUENCY: f64 = 8.0;
const MAX_HALF_STEPS: usize = 16;

/// One term `coeff * cos(a*pi*x + phase_x) * sin(b*pi*y + phase_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coeff: f64,
    pub freq_x: f64,
    pub freq_y: f64,
    pub phase_x: f64,
    pub phase_y: f64,
}

impl TrigTerm {
    pub fn new(coeff: f64, freq_x: f64, freq_y: f64, phase_x: f64, phase_y: f64) -> Self {
        Self {
            coeff,
            freq_x,
            freq_y,
            phase_x,
            phase_y,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct CompiledTerm {
    coeff: f64,
    kx: usize,
    ky: usize,
    cos_px: f64,
    sin_px: f64,
    cos_py: f64,
    sin_py: f64,
}

/// A finite sum of [`TrigTerm`]s with frequencies on the half-integer grid.
///
/// Evaluation builds `cos(k*pi*x/2)`, `sin(k*pi*x/2)` by rotation from a
/// single `sin_cos` per coordinate, so cost grows with the number of terms
/// only through multiply-adds.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    terms: Vec<TrigTerm>,
    compiled: Vec<CompiledTerm>,
    max_kx: usize,
    max_ky: usize,
    sup_norm: f64,
    lip_const: f64,
}

fn half_steps(freq: f64) -> Result<usize> {
    let k = freq * 2.0;
    if !(0.0..=MAX_FREQUENCY).contains(&freq) || k.fract() != 0.0 {
        return Err(Error::UnsupportedFrequency(freq));
    }
    Ok(k as usize)
}

/// `(cos(k*theta), sin(k*theta))` for `k = 0..=n`.
#[inline]
fn harmonics(theta: f64, n: usize) -> [(f64, f64); MAX_HALF_STEPS + 1] {
    let mut out = [(1.0, 0.0); MAX_HALF_STEPS + 1];
    let (s1, c1) = theta.sin_cos();
    for k in 1..=n {
        let (c, s) = out[k - 1];
        out[k] = (c * c1 - s * s1, s * c1 + c * s1);
    }
    out
}

impl TrigSeries {
    pub fn new(terms: Vec<TrigTerm>) -> Result<Self> {
        let mut compiled = Vec::with_capacity(terms.len());
        let (mut max_kx, mut max_ky) = (0, 0);
        let (mut sup_norm, mut lip_const) = (0.0, 0.0);
        for t in &terms {
            let kx = half_steps(t.freq_x)?;
            let ky = half_steps(t.freq_y)?;
            max_kx = max_kx.max(kx);
            max_ky = max_ky.max(ky);
            sup_norm += t.coeff.abs();
            lip_const += t.coeff.abs() * PI * t.freq_x.max(t.freq_y);
            let (sin_px, cos_px) = t.phase_x.sin_cos();
            let (sin_py, cos_py) = t.phase_y.sin_cos();
            compiled.push(CompiledTerm {
                coeff: t.coeff,
                kx,
                ky,
                cos_px,
                sin_px,
                cos_py,
                sin_py,
            });
        }
        Ok(Self {
            terms,
            compiled,
            max_kx,
            max_ky,
            sup_norm,
            lip_const,
        })
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    #[inline]
    fn angles(&self, x: f64, y: f64) -> ([(f64, f64); MAX_HALF_STEPS + 1], [(f64, f64); MAX_HALF_STEPS + 1]) {
        (
            harmonics(0.5 * PI * x, self.max_kx),
            harmonics(0.5 * PI * y, self.max_ky),
        )
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (hx, hy) = self.angles(x, y);
        self.compiled
            .iter()
            .map(|t| {
                let (cx, sx) = hx[t.kx];
                let (cy, sy) = hy[t.ky];
                let cos_arg_x = cx * t.cos_px - sx * t.sin_px;
                let sin_arg_y = sy * t.cos_py + cy * t.sin_py;
                t.coeff * cos_arg_x * sin_arg_y
            })
            .sum()
    }

    pub fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        let (hx, hy) = self.angles(x, y);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for t in &self.compiled {
            let (cx, sx) = hx[t.kx];
            let (cy, sy) = hy[t.ky];
            let cos_ax = cx * t.cos_px - sx * t.sin_px;
            let sin_ax = sx * t.cos_px + cx * t.sin_px;
            let cos_ay = cy * t.cos_py - sy * t.sin_py;
            let sin_ay = sy * t.cos_py + cy * t.sin_py;
            let a = 0.5 * PI * t.kx as f64;
            let b = 0.5 * PI * t.ky as f64;
            gx -= t.coeff * a * sin_ax * sin_ay;
            gy += t.coeff * b * cos_ax * cos_ay;
        }
        (gx, gy)
    }
}

/// The probe direction: `p(x, y) = y` on the unit strip, blended to
/// constants by cubic ramps on `[1, 2]` and `[-1, 0]`.
///
/// The ramp is `r(t) = t - t² + t³/3`, so `p` is C¹ with `p = 4/3` above
/// `y = 2` and `p = -1/3` below `y = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Probe;

impl Probe {
    pub const UPPER: f64 = 4.0 / 3.0;
    pub const LOWER: f64 = -1.0 / 3.0;

    fn ramp(t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, 1.0);
        (t - t * t + t * t * t / 3.0, 1.0 - 2.0 * t + t * t)
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y > 1.0 {
            1.0 + Self::ramp(y - 1.0).0
        } else if y < 0.0 {
            -Self::ramp(-y).0
        } else {
            y
        }
    }

    pub fn slope(&self, y: f64) -> f64 {
        if y > 1.0 {
            Self::ramp(y - 1.0).1
        } else if y < 0.0 {
            Self::ramp(-y).1
        } else {
            1.0
        }
    }
}

/// A hand-written analytic coupling.
#[derive(Clone, Copy)]
pub struct AnalyticCoupling {
    pub name: &'static str,
    pub eval: fn(f64, f64) -> f64,
    pub grad: fn(f64, f64) -> (f64, f64),
    pub sup_norm: f64,
    pub lip_const: f64,
}

impl fmt::Debug for AnalyticCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCoupling")
            .field("name", &self.name)
            .field("sup_norm", &self.sup_norm)
            .field("lip_const", &self.lip_const)
            .finish()
    }
}

fn sin_sq_tanh(x: f64, y: f64) -> f64 {
    (2.0 * PI * x).sin().powi(2) * y.tanh()
}

fn sin_sq_tanh_grad(x: f64, y: f64) -> (f64, f64) {
    let s = (2.0 * PI * x).sin();
    let c = (2.0 * PI * x).cos();
    let th = y.tanh();
    (4.0 * PI * s * c * th, s * s * (1.0 - th * th))
}

/// `sin²(2πx)·tanh(y)`, the potential behind the exceptional cohomologous
/// coupling. `|∂x| ≤ 2π`, `|∂y| ≤ 1`.
pub const SIN_SQ_TANH: AnalyticCoupling = AnalyticCoupling {
    name: "sin^2(2*pi*x)*tanh(y)",
    eval: sin_sq_tanh,
    grad: sin_sq_tanh_grad,
    sup_norm: 1.0,
    lip_const: 2.0 * PI,
};

/// A scalar field `g: [0,1) x R -> R` used as a coupling term.
#[derive(Debug, Clone, Default)]
pub enum CouplingFunction {
    #[default]
    Zero,
    Constant(f64),
    Trig(TrigSeries),
    Probe(Probe),
    Analytic(AnalyticCoupling),
    /// `base∘B_alpha - beta·base`.
    Cohomologous {
        base: Box<CouplingFunction>,
        alpha: f64,
        beta: f64,
    },
    /// `Σ weight·g`.
    Sum(Vec<(f64, CouplingFunction)>),
}

impl CouplingFunction {
    pub fn is_zero(&self) -> bool {
        match self {
            CouplingFunction::Zero => true,
            CouplingFunction::Constant(c) => *c == 0.0,
            CouplingFunction::Trig(t) => t.compiled.iter().all(|c| c.coeff == 0.0),
            _ => false,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            CouplingFunction::Zero => 0.0,
            CouplingFunction::Constant(c) => *c,
            CouplingFunction::Trig(t) => t.eval(x, y),
            CouplingFunction::Probe(p) => p.eval(y),
            CouplingFunction::Analytic(a) => (a.eval)(x, y),
            CouplingFunction::Cohomologous { base, alpha, beta } => {
                let image = baker_step(*alpha, State2::new(x, y));
                base.eval(image.x, image.y) - beta * base.eval(x, y)
            }
            CouplingFunction::Sum(parts) => parts.iter().map(|(w, g)| w * g.eval(x, y)).sum(),
        }
    }

    /// `(g_x, g_y)`. For the cohomologous variant this is the piecewise
    /// derivative on the branch selected by `x < 1/2`.
    pub fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            CouplingFunction::Zero | CouplingFunction::Constant(_) => (0.0, 0.0),
            CouplingFunction::Trig(t) => t.grad(x, y),
            CouplingFunction::Probe(p) => (0.0, p.slope(y)),
            CouplingFunction::Analytic(a) => (a.grad)(x, y),
            CouplingFunction::Cohomologous { base, alpha, beta } => {
                let image = baker_step(*alpha, State2::new(x, y));
                let (ix, iy) = base.grad(image.x, image.y);
                let (bx, by) = base.grad(x, y);
                (2.0 * ix - beta * bx, alpha * iy - beta * by)
            }
            CouplingFunction::Sum(parts) => parts.iter().fold((0.0, 0.0), |acc, (w, g)| {
                let (gx, gy) = g.grad(x, y);
                (acc.0 + w * gx, acc.1 + w * gy)
            }),
        }
    }

    /// Upper bound on `‖g‖∞`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            CouplingFunction::Zero => 0.0,
            CouplingFunction::Constant(c) => c.abs(),
            CouplingFunction::Trig(t) => t.sup_norm,
            CouplingFunction::Probe(_) => Probe::UPPER,
            CouplingFunction::Analytic(a) => a.sup_norm,
            CouplingFunction::Cohomologous { base, beta, .. } => (1.0 + beta) * base.sup_norm(),
            CouplingFunction::Sum(parts) => parts.iter().map(|(w, g)| w.abs() * g.sup_norm()).sum(),
        }
    }

    /// Upper bound on `Lip g`.
    pub fn lip_const(&self) -> f64 {
        match self {
            CouplingFunction::Zero | CouplingFunction::Constant(_) => 0.0,
            CouplingFunction::Trig(t) => t.lip_const,
            CouplingFunction::Probe(_) => 1.0,
            CouplingFunction::Analytic(a) => a.lip_const,
            CouplingFunction::Cohomologous { base, beta, .. } => (2.0 + beta) * base.lip_const(),
            CouplingFunction::Sum(parts) => parts.iter().map(|(w, g)| w.abs() * g.lip_const()).sum(),
        }
    }

    /// `self + lambda·other`.
    pub fn plus_scaled(self, lambda: f64, other: CouplingFunction) -> CouplingFunction {
        if lambda == 0.0 {
            return self;
        }
        CouplingFunction::Sum(vec![(1.0, self), (lambda, other)])
    }

    /// Short human-readable descriptor for manifests.
    pub fn describe(&self) -> String {
        match self {
            CouplingFunction::Zero => "0".into(),
            CouplingFunction::Constant(c) => format!("{c}"),
            CouplingFunction::Trig(t) => {
                let parts: Vec<String> = t
                    .terms
                    .iter()
                    .map(|t| {
                        format!(
                            "{}*cos({}*pi*x+{})*sin({}*pi*y+{})",
                            t.coeff, t.freq_x, t.phase_x, t.freq_y, t.phase_y
                        )
                    })
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
            CouplingFunction::Probe(_) => "probe(y)".into(),
            CouplingFunction::Analytic(a) => a.name.into(),
            CouplingFunction::Cohomologous { base, alpha, beta } => {
                format!("G(B_{alpha}(x,y)) - {beta}*G(x,y) with G = {}", base.describe())
            }
            CouplingFunction::Sum(parts) => parts
                .iter()
                .map(|(w, g)| format!("{w}*[{}]", g.describe()))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

/// Builds a trig coupling; an empty term list gives the zero coupling.
pub fn make_trig_coupling(terms: Vec<TrigTerm>) -> Result<CouplingFunction> {
    if terms.is_empty() {
        return Ok(CouplingFunction::Zero);
    }
    Ok(CouplingFunction::Trig(TrigSeries::new(terms)?))
}

/// `g = gtilde∘B_alpha - beta·gtilde`, whose conjugacy series telescopes to
/// `gtilde`.
pub fn make_cohomologous_coupling(p: &Params, gtilde: CouplingFunction) -> CouplingFunction {
    CouplingFunction::Cohomologous {
        base: Box::new(gtilde),
        alpha: p.alpha(),
        beta: p.beta(),
    }
}

pub fn make_probe() -> CouplingFunction {
    CouplingFunction::Probe(Probe)
}

/// Law of the random trig couplings used by ensemble probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigEnsemble {
    /// Frequencies run over `0..=max_freq` in both variables.
    pub max_freq: u32,
    /// `c_ab ~ N(0, sigma^2 / (1 + a^2 + b^2)^2)`.
    pub sigma: f64,
}

impl Default for TrigEnsemble {
    fn default() -> Self {
        Self { max_freq: 4, sigma: 0.5 }
    }
}

impl TrigEnsemble {
    /// One term per frequency pair with Gaussian coefficient and phases
    /// uniform on `[0, 2pi)`.
    pub fn draw(&self, rng: &mut impl rand::Rng) -> CouplingFunction {
        use rand_distr::{Distribution, Normal};
        let mut terms = Vec::new();
        for a in 0..=self.max_freq {
            for b in 0..=self.max_freq {
                let sd = self.sigma / (1.0 + f64::from(a * a + b * b)).powi(2);
                let coeff = Normal::new(0.0, sd).expect("finite sd").sample(rng);
                let phase_x = rng.gen_range(0.0..2.0 * PI);
                let phase_y = rng.gen_range(0.0..2.0 * PI);
                terms.push(TrigTerm::new(coeff, f64::from(a), f64::from(b), phase_x, phase_y));
            }
        }
        make_trig_coupling(terms).expect("integer frequencies up to MAX_FREQUENCY")
    }
}

/// `cos(pi*x/2)·sin(3*pi*y/2)`.
pub fn cos_sin_coupling() -> CouplingFunction {
    make_trig_coupling(vec![TrigTerm::new(1.0, 0.5, 1.5, 0.0, 0.0)]).expect("valid frequencies")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sample_ensemble() -> CouplingFunction {
        make_trig_coupling(vec![
            TrigTerm::new(0.3, 1.0, 2.0, 0.4, -1.1),
            TrigTerm::new(-0.2, 3.5, 0.5, 2.0, 0.7),
            TrigTerm::new(0.05, 4.0, 4.0, -0.3, 0.0),
            TrigTerm::new(0.7, 0.0, 1.0, 0.0, 0.2),
        ])
        .unwrap()
    }

    fn direct_trig(terms: &[TrigTerm], x: f64, y: f64) -> f64 {
        terms
            .iter()
            .map(|t| t.coeff * (t.freq_x * PI * x + t.phase_x).cos() * (t.freq_y * PI * y + t.phase_y).sin())
            .sum()
    }

    #[test]
    fn ensemble_draws_are_reproducible() {
        use crate::rng::stream;
        let e = TrigEnsemble::default();
        let a = e.draw(&mut stream(5, 1));
        let b = e.draw(&mut stream(5, 1));
        assert_eq!(a.eval(0.3, 0.7), b.eval(0.3, 0.7));
        assert_ne!(a.eval(0.3, 0.7), e.draw(&mut stream(5, 2)).eval(0.3, 0.7));
        assert!(a.sup_norm() > 0.0 && a.sup_norm() < 5.0);
    }

    #[test]
    fn cos_sin_values() {
        let g = cos_sin_coupling();
        assert_abs_diff_eq!(g.eval(0.5, 0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.eval(0.0, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.eval(0.0, 1.0), -1.0, epsilon = 1e-15);
        assert_eq!(g.sup_norm(), 1.0);
        assert_abs_diff_eq!(g.lip_const(), 1.5 * PI, epsilon = 1e-15);
    }

    #[test]
    fn empty_trig_is_zero() {
        let g = make_trig_coupling(vec![]).unwrap();
        assert!(g.is_zero());
        assert_eq!(g.eval(0.3, 0.9), 0.0);
        assert_eq!(g.sup_norm(), 0.0);
        assert_eq!(g.lip_const(), 0.0);
    }

    #[test]
    fn rejects_off_grid_frequency() {
        assert!(make_trig_coupling(vec![TrigTerm::new(1.0, 0.3, 1.0, 0.0, 0.0)]).is_err());
        assert!(make_trig_coupling(vec![TrigTerm::new(1.0, 1.0, 9.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn probe_examples() {
        let p = make_probe();
        assert_eq!(p.eval(0.3, 0.7), 0.7);
        assert_eq!(p.grad(0.3, 0.7), (0.0, 1.0));
        assert_abs_diff_eq!(p.eval(0.3, 10.0), Probe::UPPER, epsilon = 1e-15);
        assert!(p.eval(0.3, 10.0).abs() <= p.sup_norm());
        assert_abs_diff_eq!(p.eval(0.3, -5.0), Probe::LOWER, epsilon = 1e-15);
        // C¹ joins
        assert_abs_diff_eq!(p.grad(0.0, 2.0).1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.grad(0.0, -1.0).1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.grad(0.0, 1.0 + 1e-12).1, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cohomologous_of_constant() {
        let params = Params::new(0.1, 0.4).unwrap();
        let g = make_cohomologous_coupling(&params, CouplingFunction::Constant(2.0));
        for &(x, y) in &[(0.1, 0.3), (0.7, 0.95), (0.5, -3.0)] {
            assert_abs_diff_eq!(g.eval(x, y), 2.0 * 0.6, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_coupling_bounds() {
        let g = CouplingFunction::Zero;
        assert_eq!(g.sup_norm(), 0.0);
        assert_eq!(g.lip_const(), 0.0);
    }

    fn check_field(g: &CouplingFunction, x: f64, y: f64) -> std::result::Result<(), TestCaseError> {
        prop_assert!(g.eval(x, y).abs() <= g.sup_norm() + 1e-12);
        let h = 1e-6;
        let (gx, gy) = g.grad(x, y);
        let fdx = (g.eval(x + h, y) - g.eval(x - h, y)) / (2.0 * h);
        let fdy = (g.eval(x, y + h) - g.eval(x, y - h)) / (2.0 * h);
        let scale = 1.0 + g.lip_const();
        prop_assert!((fdx - gx).abs() <= 1e-5 * scale, "x: fd {} vs {}", fdx, gx);
        prop_assert!((fdy - gy).abs() <= 1e-5 * scale, "y: fd {} vs {}", fdy, gy);
        prop_assert!(gx.abs() <= g.lip_const() + 1e-9 && gy.abs() <= g.lip_const() + 1e-9);
        Ok(())
    }

    proptest! {
        #[test]
        fn trig_matches_direct_evaluation(x in 0.0f64..1.0, y in -2.0f64..3.0) {
            let g = sample_ensemble();
            let CouplingFunction::Trig(series) = &g else { unreachable!() };
            prop_assert!((g.eval(x, y) - direct_trig(series.terms(), x, y)).abs() < 1e-13);
        }

        #[test]
        fn trig_bounds_and_gradient(x in 0.001f64..0.999, y in -2.0f64..3.0) {
            check_field(&sample_ensemble(), x, y)?;
            check_field(&cos_sin_coupling(), x, y)?;
        }

        #[test]
        fn probe_bounds_and_gradient(x in 0.0f64..1.0, y in -4.0f64..5.0) {
            check_field(&make_probe(), x, y)?;
        }

        #[test]
        fn sin_sq_tanh_bounds_and_gradient(x in 0.0f64..1.0, y in -4.0f64..5.0) {
            check_field(&CouplingFunction::Analytic(SIN_SQ_TANH), x, y)?;
        }

        #[test]
        fn cohomologous_bounds_and_gradient(x in 0.001f64..0.999, y in -1.0f64..2.0) {
            prop_assume!((x - 0.5).abs() > 1e-3);
            let params = Params::new(0.1, 0.4).unwrap();
            let g = make_cohomologous_coupling(&params, CouplingFunction::Analytic(SIN_SQ_TANH));
            check_field(&g, x, y)?;
        }

        #[test]
        fn scaled_sum_is_linear(x in 0.0f64..1.0, y in 0.0f64..1.0, lambda in -2.0f64..2.0) {
            let g = cos_sin_coupling().plus_scaled(lambda, make_probe());
            let want = cos_sin_coupling().eval(x, y) + lambda * y;
            prop_assert!((g.eval(x, y) - want).abs() < 1e-14);
            check_field(&g, x.clamp(0.001, 0.999), y)?;
        }
    }
}
