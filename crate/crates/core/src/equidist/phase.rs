//! `(n^alpha, alpha n^(alpha-1))` in double-double with explicit error bounds,
//! and a summation order that depends only on term indices.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::alpha::AlphaContext;
use crate::certreal::dd::{DoubleDouble, DD_EPS};
use crate::certreal::exact::pow_scaled_floor;
use crate::certreal::power::big_to_dd;
use crate::certreal::PowerSeries;
use crate::error::{Error, Result};
use crate::math;

/// Largest tolerated absolute error of a reduced phase.
pub const PHASE_BUDGET: f64 = 1e-6;

const SERIES_FROM: u64 = 1 << 12;
const SPAN: u64 = 4096;
const SMALL_BITS: u32 = 128;

#[derive(Debug, Clone, Copy)]
pub struct PhasePoint {
    pub n: u64,
    /// `n^alpha`
    pub value: DoubleDouble,
    /// `alpha n^(alpha-1)`
    pub slope: DoubleDouble,
    pub value_err: f64,
    pub slope_err: f64,
}

impl PhasePoint {
    /// `{h1 n^alpha + h2 r alpha n^(alpha-1)}` and its error bound.
    pub fn phase(&self, h1: i64, h2r: i64) -> (f64, f64) {
        let t = self.value.mul_f64(h1 as f64) + self.slope.mul_f64(h2r as f64);
        let mag = (h1 as f64).abs() * self.value.hi.abs() + (h2r as f64).abs() * self.slope.hi.abs();
        let err = (h1 as f64).abs() * self.value_err + (h2r as f64).abs() * self.slope_err + 8.0 * DD_EPS * mag + 4.5e-16;
        (t.fract(), err)
    }
}

/// Points for `n in [start, end)`.
pub struct PhaseStream<'a> {
    ctx: &'a AlphaContext,
    alpha: DoubleDouble,
    next: u64,
    end: u64,
    series: Option<PowerSeries>,
}

impl<'a> PhaseStream<'a> {
    pub fn new(ctx: &'a AlphaContext, start: u64, end: u64) -> Self {
        let e = ctx.exponent();
        let alpha = DoubleDouble::from_f64(e.numer() as f64).div(DoubleDouble::from_f64(e.denom() as f64));
        PhaseStream { ctx, alpha, next: start.max(1), end, series: None }
    }

    fn small(&self, n: u64) -> PhasePoint {
        let e = self.ctx.exponent();
        let f = pow_scaled_floor(&(BigUint::from(n) << SMALL_BITS as u64), SMALL_BITS, e.numer(), e.denom());
        let value = big_to_dd(&f, SMALL_BITS);
        let slope = (value * self.alpha).div(DoubleDouble::from_u128(n as u128));
        let value_err = value.hi * 1e-30 + math::ldexp(1.0, -(SMALL_BITS as i32) + 1);
        PhasePoint { n, value, slope, value_err, slope_err: slope.hi * 1e-30 + value_err }
    }
}

impl Iterator for PhaseStream<'_> {
    type Item = PhasePoint;

    fn next(&mut self) -> Option<PhasePoint> {
        if self.next >= self.end {
            return None;
        }
        let n = self.next;
        self.next += 1;
        if n < SERIES_FROM {
            return Some(self.small(n));
        }
        if !self.series.as_ref().is_some_and(|s| s.covers(n)) {
            self.series = Some(PowerSeries::new(self.ctx, n, SPAN));
        }
        let s = self.series.as_ref().unwrap();
        let j = n - s.anchor();
        Some(PhasePoint { n, value: s.value(j), slope: s.derivative(j), value_err: s.value_err(), slope_err: s.deriv_err() })
    }
}

/// Sum of `(cos, sin)` pairs in a fixed binary tree over blocks of 256 terms,
/// so the rounding depends only on term order, not on how work was scheduled.
#[derive(Debug, Default, Clone)]
pub struct PairwiseSum {
    stack: Vec<(u32, f64, f64)>,
    block: (f64, f64),
    filled: u32,
}

const BLOCK: u32 = 256;

impl PairwiseSum {
    pub fn push(&mut self, re: f64, im: f64) {
        self.block.0 += re;
        self.block.1 += im;
        self.filled += 1;
        if self.filled == BLOCK {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let (mut re, mut im) = core::mem::take(&mut self.block);
        self.filled = 0;
        let mut level = 0;
        while let Some(&(l, r2, i2)) = self.stack.last() {
            if l != level {
                break;
            }
            self.stack.pop();
            re += r2;
            im += i2;
            level += 1;
        }
        self.stack.push((level, re, im));
    }

    pub fn finish(mut self) -> (f64, f64) {
        if self.filled > 0 {
            self.flush();
        }
        self.stack.iter().rev().fold((0.0, 0.0), |(a, b), &(_, r, i)| (a + r, b + i))
    }
}

pub(crate) fn check_budget(err: f64) -> Result<()> {
    if err > PHASE_BUDGET {
        return Err(Error::Tolerance(err));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::exact_phase;

    #[test]
    fn phases_match_exact_reduction() {
        let c = AlphaContext::parse("1.5").unwrap();
        for start in [1u64, 4000, 444_444_444_444] {
            for p in PhaseStream::new(&c, start, start + 300).step_by(37) {
                for (h1, h2) in [(1i64, 0i64), (0, 1), (1, 1), (3, -2)] {
                    let (ph, err) = p.phase(h1, h2);
                    assert!(err < PHASE_BUDGET);
                    let want = exact_phase(&c, p.n, h1, h2, 1);
                    let diff = (ph - want).abs();
                    assert!(diff.min(1.0 - diff) <= err + 1e-15, "n={} h=({h1},{h2}) {ph} vs {want}", p.n);
                }
            }
        }
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let mut a = PairwiseSum::default();
        for i in 0..10_000 {
            a.push(i as f64, -(i as f64));
        }
        let (re, im) = a.finish();
        assert_eq!(re, 49_995_000.0);
        assert_eq!(im, -49_995_000.0);
    }
}
