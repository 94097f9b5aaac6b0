use crate::dynamics::{baker_inverse, upper_half, State2};
use crate::error::{Error, Result};

use super::cantor::Digits;

/// Backward orbit `(x_{-1}, y_{-1}), …, (x_{-n}, y_{-n})` of a point on the
/// drive attractor. Entry `k` holds `B^{-k-1}(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PastHistory {
    entries: Vec<State2>,
}

impl PastHistory {
    pub fn entries(&self) -> &[State2] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<State2> {
        self.entries.last().copied()
    }
}

/// Reconstructs `n` steps of past history by repeated inversion.
///
/// Inversion expands `y` by `1/alpha` per step, so round-off eventually
/// pushes `y` off the slab; the error carries the index and the entries
/// recovered so far.
pub fn past_history(alpha: f64, s: State2, n: usize) -> Result<PastHistory> {
    let mut entries = Vec::with_capacity(n);
    let mut cur = s;
    for index in 0..n {
        if !(0.0..=1.0).contains(&cur.y) {
            return Err(Error::HistoryEscape {
                index,
                partial: entries,
            });
        }
        cur = match baker_inverse(alpha, cur) {
            Ok(prev) => prev,
            Err(_) => {
                return Err(Error::HistoryEscape {
                    index,
                    partial: entries,
                })
            }
        };
        entries.push(cur);
    }
    Ok(PastHistory { entries })
}

/// Past history generated from the digit expansion of `y`: the inverse
/// branch at step `i` is digit `i`. Entries are exact forward preimages, so
/// no slab escape can occur. Needs `digits.len() > n`; entry `k` carries a
/// truncation error of `alpha^(digits.len() - k - 1)` in `y`.
pub fn history_from_digits(alpha: f64, x: f64, digits: &Digits, n: usize) -> PastHistory {
    assert!(digits.len() > n, "need more digits than history steps");
    let ys = y_preimages(alpha, digits, n);
    let mut entries = Vec::with_capacity(n);
    let mut xk = x;
    for (k, &y) in ys.iter().enumerate() {
        xk = if digits.get(k) { upper_half(xk) } else { xk / 2.0 };
        entries.push(State2::new(xk, y));
    }
    PastHistory { entries }
}

/// `y_{-1}, …, y_{-n}` from the digits, each the Cantor value of the digit
/// tail starting one past its index.
pub(crate) fn y_preimages(alpha: f64, digits: &Digits, n: usize) -> Vec<f64> {
    let mut ys = vec![0.0; n];
    let mut v = digits.cantor_tail(alpha, n);
    for k in (0..n).rev() {
        ys[k] = v;
        v = if digits.get(k) {
            crate::dynamics::right_branch_y(alpha, v)
        } else {
            alpha * v
        };
    }
    ys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::baker_step;
    use crate::measure::cantor::{precision_depth, CantorPoint};
    use crate::rng::{stream, unit_f64};

    #[test]
    fn fixed_point_history() {
        let h = past_history(0.25, State2::new(0.0, 0.0), 5).unwrap();
        assert_eq!(h.entries(), &[State2::new(0.0, 0.0); 5]);
    }

    #[test]
    fn one_step_history() {
        let h = past_history(0.25, State2::new(0.5, 0.875), 1).unwrap();
        assert_eq!(h.entries(), &[State2::new(0.75, 0.5)]);
    }

    #[test]
    fn reconstruction_eventually_escapes() {
        let mut rng = stream(4, 0);
        let p = CantorPoint::from_digits(0.3, Digits::random(&mut rng, 60));
        match past_history(0.3, State2::new(0.4, p.value), 200) {
            Err(Error::HistoryEscape { index, partial }) => {
                assert_eq!(partial.len(), index);
                assert!(index > 5);
            }
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn reconstruction_round_trips() {
        let mut rng = stream(5, 0);
        for _ in 0..1000 {
            let a = 0.25;
            let p = CantorPoint::from_digits(a, Digits::random(&mut rng, 60));
            let s = State2::new(unit_f64(&mut rng), p.value);
            let n = 8;
            let h = past_history(a, s, n).unwrap();
            let mut back = h.last().unwrap();
            for _ in 0..n {
                back = baker_step(a, back);
            }
            // round-off in each inverse x step is doubled on every forward step
            assert!((back.x - s.x).abs() <= 2f64.powi(n as i32) * f64::EPSILON);
            assert!((back.y - s.y).abs() <= n as f64 * f64::EPSILON);
        }
    }

    #[test]
    fn generated_history_replays_forward() {
        let mut rng = stream(6, 0);
        for _ in 0..1000 {
            let a = 0.1;
            let n = 50;
            let digits = Digits::random(&mut rng, n + precision_depth(a));
            let x = unit_f64(&mut rng);
            let y = digits.cantor_tail(a, 0);
            let h = history_from_digits(a, x, &digits, n);
            let mut next = State2::new(x, y);
            for e in h.entries() {
                let fwd = baker_step(a, *e);
                assert_eq!(fwd.y.to_bits(), next.y.to_bits());
                assert!((fwd.x - next.x).abs() <= f64::EPSILON);
                next = *e;
            }
        }
    }

    #[test]
    fn generated_history_matches_reconstruction_near_present() {
        let mut rng = stream(7, 0);
        let a = 0.25;
        let digits = Digits::random(&mut rng, 80);
        let y = digits.cantor_tail(a, 0);
        let gen = history_from_digits(a, 0.3, &digits, 10);
        let rec = past_history(a, State2::new(0.3, y), 10).unwrap();
        for (g, r) in gen.entries().iter().zip(rec.entries()) {
            assert!((g.x - r.x).abs() < 1e-15);
            assert!((g.y - r.y).abs() < 1e-9);
        }
    }
}
