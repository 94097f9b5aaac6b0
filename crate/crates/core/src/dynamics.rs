//! Exact stepping of the skinny baker's map and the coupled four-dimensional
//! system built from two of them.
//!
//! The drive map acts on `(x, y)` with contraction `alpha`, the response map on
//! `(z, w)` with contraction `beta`. Coupling enters additively:
//!
//! ```text
//! y' = alpha*y (+ 1 - alpha) + f(z, w)
//! w' = beta*w  (+ 1 - beta)  + g(x, y)
//! ```
//!
//! Branches are decided on the input state with half-open intervals, so
//! `x = 1/2` takes the right branch.

use serde::{Deserialize, Serialize};

use crate::coupling::CouplingFunction;
use crate::error::{Error, Result};

/// Contraction rates of the drive and response baker maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.alpha, raw.beta)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = |r: f64| r > 0.0 && r < 0.5;
        if ok(alpha) && ok(beta) {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidParams { alpha, beta })
        }
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A point of `[0,1) x R`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State2 {
    pub x: f64,
    pub y: f64,
}

impl State2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A point `(x, y, z, w)` of `([0,1) x R)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl State4 {
    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    pub fn from_pairs(drive: State2, response: State2) -> Self {
        Self::new(drive.x, drive.y, response.x, response.y)
    }

    pub fn drive(&self) -> State2 {
        State2::new(self.x, self.y)
    }

    pub fn response(&self) -> State2 {
        State2::new(self.z, self.w)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// One step of the skinny baker's map with contraction `contraction`.
///
/// `2x mod 1` is formed as `2x` or `2x - 1` by branch, never through a
/// generic modulo.
#[inline]
pub fn baker_step(contraction: f64, s: State2) -> State2 {
    debug_assert!((0.0..1.0).contains(&s.x), "x out of [0,1): {}", s.x);
    if s.x < 0.5 {
        State2::new(2.0 * s.x, contraction * s.y)
    } else {
        State2::new(2.0 * s.x - 1.0, right_branch_y(contraction, s.y))
    }
}

/// `contraction*y + (1 - contraction)`, the single expression every caller
/// uses for the upper branch so that histories replay bit-for-bit.
#[inline]
pub(crate) fn right_branch_y(contraction: f64, y: f64) -> f64 {
    contraction * y + (1.0 - contraction)
}

/// Inverse of [`baker_step`] on `[0,1) x ([0, c] ∪ [1-c, 1])`.
pub fn baker_inverse(contraction: f64, s: State2) -> Result<State2> {
    let lo = contraction;
    let hi = 1.0 - contraction;
    if s.y > lo && s.y < hi {
        return Err(Error::OutsideSlab { y: s.y, lo, hi });
    }
    if s.y <= 0.5 {
        Ok(State2::new(s.x / 2.0, s.y / contraction))
    } else {
        Ok(State2::new(
            upper_half(s.x),
            (s.y - (1.0 - contraction)) / contraction,
        ))
    }
}

/// `(x + 1) / 2`, kept strictly below one.
#[inline]
pub(crate) fn upper_half(x: f64) -> f64 {
    let v = 0.5 + 0.5 * x;
    if v < 1.0 {
        v
    } else {
        1.0 - f64::EPSILON / 2.0
    }
}

/// One step of the coupled system. Both coupling terms read the pre-step
/// state.
#[inline]
pub fn coupled_step(
    p: &Params,
    f: &CouplingFunction,
    g: &CouplingFunction,
    s: State4,
) -> State4 {
    let drive = baker_step(p.alpha, s.drive());
    let response = baker_step(p.beta, s.response());
    let fy = if f.is_zero() { 0.0 } else { f.eval(s.z, s.w) };
    let gw = if g.is_zero() { 0.0 } else { g.eval(s.x, s.y) };
    State4::new(drive.x, drive.y + fy, response.x, response.y + gw)
}

/// Derivative of the coupled map, a 4x4 row-major matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian4(pub [[f64; 4]; 4]);

impl Jacobian4 {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn mul_vec(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// True when only the entries allowed for `f = 0` are nonzero: the
    /// diagonal plus `(3,0)` and `(3,1)`.
    pub fn has_skew_pattern(&self) -> bool {
        (0..4).all(|r| {
            (0..4).all(|c| {
                let allowed = r == c || (r == 3 && c < 2);
                allowed || self.0[r][c] == 0.0
            })
        })
    }
}

/// The derivative at `s`. Rejects states whose `x` or `z` sits exactly on the
/// branch boundary `1/2`.
pub fn jacobian(
    p: &Params,
    f: &CouplingFunction,
    g: &CouplingFunction,
    s: State4,
) -> Result<Jacobian4> {
    if s.x == 0.5 || s.z == 0.5 {
        return Err(Error::OnBranchBoundary { x: s.x, z: s.z });
    }
    let (gx, gy) = g.grad(s.x, s.y);
    let (fz, fw) = f.grad(s.z, s.w);
    Ok(Jacobian4([
        [2.0, 0.0, 0.0, 0.0],
        [0.0, p.alpha, fz, fw],
        [0.0, 0.0, 2.0, 0.0],
        [gx, gy, 0.0, p.beta],
    ]))
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The `y` and `w` extents of the forward-invariant box `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingBox {
    pub y: Interval,
    pub w: Interval,
}

impl AbsorbingBox {
    pub fn contains(&self, s: &State4) -> bool {
        (0.0..1.0).contains(&s.x)
            && (0.0..1.0).contains(&s.z)
            && self.y.contains(s.y)
            && self.w.contains(s.w)
    }
}

/// Bounds of `V` for padding `delta >= 0` and response coupling `g` (with
/// `f = 0`).
pub fn absorbing_bounds(p: &Params, g: &CouplingFunction, delta: f64) -> AbsorbingBox {
    let spread = g.sup_norm() / (1.0 - p.beta);
    AbsorbingBox {
        y: Interval {
            lo: -delta,
            hi: 1.0 + delta,
        },
        w: Interval {
            lo: -delta - spread,
            hi: 1.0 + delta + spread,
        },
    }
}

/// A coupled map with its coupling functions bundled.
#[derive(Debug, Clone)]
pub struct CoupledMap {
    pub params: Params,
    pub f: CouplingFunction,
    pub g: CouplingFunction,
}

impl CoupledMap {
    /// Uni-directional coupling `f = 0`.
    pub fn skew(params: Params, g: CouplingFunction) -> Self {
        Self {
            params,
            f: CouplingFunction::Zero,
            g,
        }
    }

    pub fn uncoupled(params: Params) -> Self {
        Self::skew(params, CouplingFunction::Zero)
    }

    #[inline]
    pub fn step(&self, s: State4) -> State4 {
        coupled_step(&self.params, &self.f, &self.g, s)
    }

    pub fn jacobian(&self, s: State4) -> Result<Jacobian4> {
        jacobian(&self.params, &self.f, &self.g, s)
    }

    pub fn absorbing_bounds(&self, delta: f64) -> AbsorbingBox {
        absorbing_bounds(&self.params, &self.g, delta)
    }
}
