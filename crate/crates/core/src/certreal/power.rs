//! `floor(n^alpha)` and `{n^alpha}`.
//!
//! With `alpha = p/q`, `floor(n^alpha) = floor((n^p)^(1/q))`, an integer
//! root, so the floor is always decidable exactly. The double and
//! double-double paths below are accelerations that fall back to the integer
//! root whenever their error budget cannot separate the value from an integer.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, ToPrimitive};

use crate::alpha::{AlphaContext, Exponent};
use crate::certreal::cert::F64_REL_ERR;
use crate::certreal::dd::{DoubleDouble, DD_EPS};
use crate::certreal::exact::{adjust_root_u128, checked_pow_u128, floor_root, iroot_u128, perfect_root, pow_scaled_floor, Dyadic};
use crate::certreal::CertifiedValue;
use crate::math;

/// `floor(n^(p/q))` by exact integer roots.
pub fn exact_floor_pow(n: u64, e: Exponent) -> u128 {
    let (p, q) = (e.numer(), e.denom());
    match checked_pow_u128(n as u128, p) {
        Some(x) => iroot_u128(x, q),
        None => {
            let x = BigUint::from(n).pow(p);
            floor_root(&x, q).to_u128().expect("n^alpha < 2^128 for n < 2^64")
        }
    }
}

/// `floor(n^alpha)`. Never fails: the integer-root path decides every case.
pub fn floor_pow(n: u64, ctx: &AlphaContext) -> u128 {
    if n <= 1 {
        return n as u128;
    }
    let v = math::pow(n as f64, ctx.alpha());
    if v < 68_719_476_736.0 {
        // 2^36: the error budget is below 2^-4 here.
        let m = math::floor(v);
        let err = v * F64_REL_ERR;
        if v - m > err && m + 1.0 - v > err {
            return m as u128;
        }
    }
    exact_floor_pow(n, ctx.exponent())
}

/// Enclosure of `{n^alpha}`; exactly zero when `n` is a perfect `q`-th power.
pub fn frac_pow(n: u64, ctx: &AlphaContext) -> CertifiedValue {
    let e = ctx.exponent();
    if n == 0 || perfect_root(n, e.denom()).is_some() {
        return CertifiedValue::exact(0.0);
    }
    let s = ctx.policy.initial_bits;
    let f = BigInt::from(pow_scaled_floor(&(BigUint::from(n) << s as u64), s, e.numer(), e.denom()));
    let m = BigInt::from(floor_pow(n, ctx));
    let base = m << s as u64;
    // n^alpha is irrational here, so it lies strictly inside [f, f + 1] * 2^-s.
    let d = Dyadic::from_bounds(&f - &base, f + 1 - base, s);
    CertifiedValue::from_dyadic(&d).clamp_unit()
}

/// Taylor expansion of `(n0 + j)^alpha` for `0 <= j < span` in double-double.
///
/// The anchor `n0^alpha` comes from an exact integer root, so the expansion
/// carries an explicit absolute error bound rather than trusting `pow`.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    n0: u64,
    span: u64,
    coeffs: Vec<DoubleDouble>,
    err_value: f64,
    err_deriv: f64,
}

const ANCHOR_BITS: u32 = 64;
const TAIL_TARGET: f64 = 8.271806125530277e-25; // 2^-80

impl PowerSeries {
    /// `span` is clamped to `n0 / 16` so consecutive terms shrink by at least 16x.
    pub fn new(ctx: &AlphaContext, n0: u64, span: u64) -> Self {
        assert!(n0 >= 16, "series anchor too small");
        let span = span.clamp(1, n0 / 16);
        let e = ctx.exponent();
        let f = pow_scaled_floor(&(BigUint::from(n0) << ANCHOR_BITS as u64), ANCHOR_BITS, e.numer(), e.denom());
        let c0 = big_to_dd(&f, ANCHOR_BITS);
        let alpha = DoubleDouble::from_f64(e.numer() as f64).div(DoubleDouble::from_f64(e.denom() as f64));
        let s = span as f64;
        let mut coeffs = alloc::vec![c0];
        let (mut sum, mut dsum) = (c0.hi.abs(), 0.0f64);
        let mut k = 1u32;
        let next = loop {
            let prev = coeffs[k as usize - 1];
            let num = alpha.add_f64(-(k as f64 - 1.0));
            let den = DoubleDouble::from_u128(k as u128 * n0 as u128);
            let ck = (prev * num).div(den);
            let term = ck.hi.abs() * math::pow(s, k as f64);
            let dterm = k as f64 * ck.hi.abs() * math::pow(s, k as f64 - 1.0);
            if k >= 2 && term < TAIL_TARGET && dterm < TAIL_TARGET {
                break ck;
            }
            coeffs.push(ck);
            sum += term;
            dsum += dterm;
            k += 1;
            assert!(k < 64, "power series failed to converge");
        };
        let kk = coeffs.len() as f64;
        let anchor_rel = math::ldexp(1.0, -(ANCHOR_BITS as i32)) / c0.hi + 1e-31;
        let round = 8.0 * (kk + 2.0) * DD_EPS;
        let tail = 2.0 * next.hi.abs() * math::pow(s, kk);
        let dtail = 2.0 * kk * next.hi.abs() * math::pow(s, kk - 1.0);
        PowerSeries {
            n0,
            span,
            coeffs,
            err_value: 2.0 * (sum * (anchor_rel + round) + tail),
            err_deriv: 2.0 * (dsum * (anchor_rel + round) + dtail),
        }
    }

    pub fn anchor(&self) -> u64 {
        self.n0
    }

    pub fn span(&self) -> u64 {
        self.span
    }

    pub fn covers(&self, n: u64) -> bool {
        n >= self.n0 && n - self.n0 < self.span
    }

    /// `(n0 + j)^alpha`, within `value_err()`.
    pub fn value(&self, j: u64) -> DoubleDouble {
        let x = j as f64;
        let mut acc = *self.coeffs.last().unwrap();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul_f64(x) + *c;
        }
        acc
    }

    /// `alpha (n0 + j)^(alpha - 1)`, within `deriv_err()`.
    pub fn derivative(&self, j: u64) -> DoubleDouble {
        let x = j as f64;
        let k = self.coeffs.len();
        let mut acc = self.coeffs[k - 1].mul_f64((k - 1) as f64);
        for i in (1..k - 1).rev() {
            acc = acc.mul_f64(x) + self.coeffs[i].mul_f64(i as f64);
        }
        acc
    }

    pub fn value_err(&self) -> f64 {
        self.err_value
    }

    pub fn deriv_err(&self) -> f64 {
        self.err_deriv
    }
}

/// `x * 2^-shift` as a double-double (error below `2^-104` relative).
pub(crate) fn big_to_dd(x: &BigUint, shift: u32) -> DoubleDouble {
    let hi = x.to_f64().expect("finite");
    let rem = BigInt::from(x.clone()) - BigInt::from_f64(hi).expect("integral double");
    let lo = rem.to_f64().expect("finite");
    let s = -(shift as i32);
    DoubleDouble::from_f64(math::ldexp(hi, s)).add_f64(math::ldexp(lo, s))
}

/// Integer part and fractional part of a nonnegative double-double.
/// The fractional part carries an absolute rounding error below `2^-51`.
pub(crate) fn dd_split(v: DoubleDouble) -> (i128, f64) {
    let a = math::floor(v.hi);
    let rem = (v.hi - a) + v.lo;
    let fl = math::floor(rem);
    (a as i128 + fl as i128, rem - fl)
}

const DD_SPLIT_ERR: f64 = 4.440892098500626e-16; // 2^-51

/// Sequential `floor(n^alpha)` for `n = start, start + 1, ...`.
///
/// Picks the cheapest exact strategy for the range: incremental `u128` roots
/// when `n^p` fits, otherwise a double-double Taylor series re-anchored
/// every few thousand steps, with exact roots for undecided values.
pub struct FloorCursor<'a> {
    ctx: &'a AlphaContext,
    next: u64,
    mode: Mode,
}

enum Mode {
    Wide { p: u32, q: u32, last: Option<(u128, u128)> },
    Series(Option<PowerSeries>),
    Exact,
}

const SERIES_SPAN: u64 = 4096;

impl<'a> FloorCursor<'a> {
    /// A cursor expected to run no further than `end` (exclusive); past it the
    /// cursor stays exact but may be slower.
    pub fn new(ctx: &'a AlphaContext, start: u64, end: u64) -> Self {
        let e = ctx.exponent();
        let mode = if checked_pow_u128(end.max(start) as u128, e.numer()).is_some() {
            Mode::Wide { p: e.numer(), q: e.denom(), last: None }
        } else if start >= 1 << 12 {
            Mode::Series(None)
        } else {
            Mode::Exact
        };
        FloorCursor { ctx, next: start, mode }
    }

    pub fn position(&self) -> u64 {
        self.next
    }
}

impl Iterator for FloorCursor<'_> {
    type Item = u128;

    #[inline]
    fn next(&mut self) -> Option<u128> {
        let n = self.next;
        self.next += 1;
        let ctx = self.ctx;
        let v = match &mut self.mode {
            Mode::Wide { p, q, last } => match checked_pow_u128(n as u128, *p) {
                Some(x) => {
                    let v = match *last {
                        Some((prev, gap)) => adjust_root_u128(x, *q, prev + gap),
                        None => iroot_u128(x, *q),
                    };
                    *last = Some((v, last.map_or(0, |(prev, _)| v - prev)));
                    v
                }
                None => {
                    self.mode = Mode::Series(None);
                    exact_floor_pow(n, ctx.exponent())
                }
            },
            Mode::Series(slot) => {
                if !slot.as_ref().is_some_and(|s| s.covers(n)) {
                    *slot = Some(PowerSeries::new(ctx, n, SERIES_SPAN));
                }
                let s = slot.as_ref().unwrap();
                let (int, frac) = dd_split(s.value(n - s.anchor()));
                let err = s.value_err() + DD_SPLIT_ERR;
                if frac > err && 1.0 - frac > err {
                    int as u128
                } else {
                    exact_floor_pow(n, ctx.exponent())
                }
            }
            Mode::Exact => {
                if n >= 1 << 12 && checked_pow_u128(n as u128, ctx.exponent().numer()).is_none() {
                    self.mode = Mode::Series(None);
                }
                floor_pow(n, ctx)
            }
        };
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> AlphaContext {
        AlphaContext::parse(s).unwrap()
    }

    #[test]
    fn spec_values() {
        let c = ctx("1.5");
        assert_eq!(floor_pow(4, &c), 8);
        assert_eq!(floor_pow(5, &c), 11);
        assert_eq!(floor_pow(1, &c), 1);
        assert_eq!(floor_pow(1, &ctx("1.7")), 1);
        assert!(frac_pow(4, &c).is_exact());
        assert_eq!(frac_pow(4, &c).hi, 0.0);
        let f = frac_pow(2, &c);
        assert!(f.contains(0.8284271247461901) && f.width() < 1e-15);
        let f = frac_pow(5, &c);
        assert!(f.contains(0.18033988749894848) && f.width() < 1e-15);
    }

    #[test]
    fn cursor_matches_exact_roots_in_every_mode() {
        for a in ["1.5", "1.7", "1.2", "13/10"] {
            let c = ctx(a);
            for (start, len) in [(1u64, 3000u64), (1 << 20, 3000), (1 << 40, 20000), (u64::MAX / 8, 3000)] {
                let cur = FloorCursor::new(&c, start, start + len);
                for (i, v) in cur.take(len as usize).enumerate() {
                    let n = start + i as u64;
                    assert_eq!(v, exact_floor_pow(n, c.exponent()), "alpha={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn series_error_bounds_hold() {
        let c = ctx("1.5");
        let n0 = 440_000_000_000u64;
        let s = PowerSeries::new(&c, n0, 4096);
        assert!(s.value_err() < 1e-11, "{}", s.value_err());
        for j in [0u64, 1, 1000, 4095] {
            // (n0 + j)^1.5 to 64 fractional bits
            let f = pow_scaled_floor(&(BigUint::from(n0 + j) << 64u64), 64, 3, 2);
            let exact = big_to_dd(&f, 64);
            let diff = (s.value(j) - exact).to_f64().abs();
            assert!(diff <= s.value_err() + 1e-19, "j={j} diff={diff}");
            let d = 1.5 * ((n0 + j) as f64).sqrt();
            assert!((s.derivative(j).to_f64() - d).abs() / d < 1e-15);
        }
    }
}
