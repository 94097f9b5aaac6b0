use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dynamics::right_branch_y;

/// A finite 0/1 digit string, packed 64 digits per word.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Digits {
    words: Vec<u64>,
    len: usize,
}

impl Digits {
    /// `len` independent fair digits from `rng`.
    pub fn random(rng: &mut impl RngCore, len: usize) -> Self {
        let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Self { words, len }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self {
            words,
            len: bits.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// `0`/`1` string, first digit first.
    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Cantor coordinate of the digits `start..len`:
    /// `(1-c)·Σ c^(i-start)·b_i`, evaluated from the deepest digit up with
    /// the same arithmetic as the forward baker step.
    pub fn cantor_tail(&self, contraction: f64, start: usize) -> f64 {
        (start..self.len).rev().fold(0.0, |v, i| {
            if self.get(i) {
                right_branch_y(contraction, v)
            } else {
                contraction * v
            }
        })
    }
}

/// A point of the middle Cantor set `A_c` given by its digit expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorPoint {
    pub contraction: f64,
    pub digits: Digits,
    pub value: f64,
}

impl CantorPoint {
    pub fn from_digits(contraction: f64, digits: Digits) -> Self {
        let value = digits.cantor_tail(contraction, 0);
        Self {
            contraction,
            digits,
            value,
        }
    }

    /// Bound on the distance to the infinite-digit point: `c^depth`.
    pub fn truncation_error(&self) -> f64 {
        self.contraction.powi(self.digits.len() as i32)
    }
}

/// Draws a point of the Cantor measure `ν_c`, discretised at `c^depth`.
pub fn sample_cantor(contraction: f64, digit_source: &mut impl RngCore, depth: usize) -> CantorPoint {
    assert!(depth >= 1, "depth must be at least 1");
    CantorPoint::from_digits(contraction, Digits::random(digit_source, depth))
}

/// Digits needed so that truncation stays below double-precision round-off.
pub fn precision_depth(contraction: f64) -> usize {
    ((f64::EPSILON / 4.0).ln() / contraction.ln()).ceil() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn digit_examples() {
        let third = 1.0 / 3.0;
        let zeros = CantorPoint::from_digits(third, Digits::from_bits(&[0; 40]));
        assert_eq!(zeros.value, 0.0);
        let ones = CantorPoint::from_digits(third, Digits::from_bits(&[1; 30]));
        assert_abs_diff_eq!(ones.value, 1.0 - third.powi(30), epsilon = 1e-15);
        let mut first = vec![0u8; 20];
        first[0] = 1;
        let p = CantorPoint::from_digits(third, Digits::from_bits(&first));
        assert_abs_diff_eq!(p.value, 2.0 / 3.0, epsilon = 2.0 * f64::EPSILON);
    }

    #[test]
    fn bits_round_trip_through_string() {
        let d = Digits::random(&mut stream(3, 0), 130);
        let s = d.to_bit_string();
        let back = Digits::from_bits(&s.bytes().map(|c| c - b'0').collect::<Vec<_>>());
        assert_eq!(d, back);
    }

    #[test]
    fn samples_lie_in_the_slab() {
        let mut rng = stream(1, 0);
        for _ in 0..10_000 {
            let p = sample_cantor(0.3, &mut rng, 40);
            assert!((0.0..=1.0).contains(&p.value));
            assert!(p.value <= 0.3 || p.value >= 0.7);
        }
    }

    #[test]
    fn ball_mass_scaling_bound() {
        // ν(B(y, a^k)) <= ν(level k-1 cylinder) = 2 a^(k d) for centres in the set
        for &a in &[0.2f64, 0.25, 0.4] {
            let d = -(2f64.ln()) / a.ln();
            let mut rng = stream(2, 0);
            let depth = precision_depth(a);
            let mut values: Vec<f64> = (0..1_000_000)
                .map(|_| sample_cantor(a, &mut rng, depth).value)
                .collect();
            values.sort_by(f64::total_cmp);
            let n = values.len() as f64;
            let mut worst: f64 = 0.0;
            let k_max = ((1000.0f64).ln() / (2f64).ln()).floor() as i32; // keep ≥1000 expected hits
            for c in 0..1000 {
                let y = values[c * 997 % values.len()];
                for k in 1..=k_max {
                    let r = a.powi(k);
                    let lo = values.partition_point(|&v| v < y - r);
                    let hi = values.partition_point(|&v| v <= y + r);
                    let mass = (hi - lo) as f64 / n;
                    worst = worst.max(mass / r.powf(d));
                }
            }
            assert!(worst <= 2.2, "alpha={a}: C={worst}");
        }
    }
}
