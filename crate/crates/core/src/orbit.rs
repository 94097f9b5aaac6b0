//! Long orbits of the coupled map without floating-point collapse.
//!
//! Doubling `x` in double precision shifts one mantissa bit out per step, so
//! every float orbit reaches `x = 0` within 53 iterations. [`Orbit`] carries
//! `x` and `z` as 53-bit binary expansions and appends a fresh random bit at
//! the bottom after each shift. The result is the exact orbit of a real
//! initial condition that agrees with the float start in its first 53 bits.

use rand::RngCore;

use crate::dynamics::{CoupledMap, State4};
use crate::rng::{stream, StreamRng};

const MANTISSA_BITS: u32 = 53;
const MASK: u64 = (1u64 << MANTISSA_BITS) - 1;
const ULP: f64 = 1.0 / (1u64 << MANTISSA_BITS) as f64;

#[inline]
fn to_bits(v: f64) -> u64 {
    debug_assert!((0.0..1.0).contains(&v));
    // exact for every multiple of 2^-53; finer inputs are truncated
    (v * (1u64 << MANTISSA_BITS) as f64) as u64 & MASK
}

/// Orbit state plus the bit streams feeding the doubling coordinates.
#[derive(Debug, Clone)]
pub struct Orbit<'a> {
    map: &'a CoupledMap,
    state: State4,
    x_bits: u64,
    z_bits: u64,
    refill: StreamRng,
    spare: u64,
    spare_left: u32,
}

impl<'a> Orbit<'a> {
    /// Starts an orbit at `start`; bits beyond the 53rd come from the stream
    /// keyed by `refill_seed`.
    pub fn new(map: &'a CoupledMap, start: State4, refill_seed: u64) -> Self {
        let x_bits = to_bits(start.x);
        let z_bits = to_bits(start.z);
        let state = State4::new(x_bits as f64 * ULP, start.y, z_bits as f64 * ULP, start.w);
        Self {
            map,
            state,
            x_bits,
            z_bits,
            refill: stream(refill_seed, 0),
            spare: 0,
            spare_left: 0,
        }
    }

    pub fn state(&self) -> State4 {
        self.state
    }

    #[inline]
    fn next_bit(&mut self) -> u64 {
        if self.spare_left == 0 {
            self.spare = self.refill.next_u64();
            self.spare_left = 64;
        }
        let b = self.spare & 1;
        self.spare >>= 1;
        self.spare_left -= 1;
        b
    }

    /// Advances one step and returns the new state.
    #[inline]
    pub fn advance(&mut self) -> State4 {
        let mut next = self.map.step(self.state);
        self.x_bits = ((self.x_bits << 1) & MASK) | self.next_bit();
        self.z_bits = ((self.z_bits << 1) & MASK) | self.next_bit();
        debug_assert_eq!((self.x_bits >> 1) as f64 * 2.0 * ULP, next.x);
        next.x = self.x_bits as f64 * ULP;
        next.z = self.z_bits as f64 * ULP;
        self.state = next;
        next
    }

    /// Advances `n` steps, discarding the intermediate states.
    pub fn discard(&mut self, n: usize) {
        for _ in 0..n {
            self.advance();
        }
    }
}

impl Iterator for Orbit<'_> {
    type Item = State4;

    fn next(&mut self) -> Option<State4> {
        Some(self.advance())
    }
}
