//! Exact integer roots and outward-rounded fixed-point intervals.
//!
//! Every certified decision in the crate eventually lands here: a real
//! quantity is enclosed in `[lo, hi] * 2^-shift` with big-integer endpoints,
//! and rational powers of such enclosures are computed with exact integer
//! `q`-th roots, so no enclosure ever depends on floating-point rounding.

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::math;

pub fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `floor(x^(1/q))` for `q >= 1`.
pub fn iroot_u128(x: u128, q: u32) -> u128 {
    match q {
        0 => panic!("zeroth root"),
        1 => x,
        2 => x.isqrt(),
        _ => {
            if x < 2 {
                return x;
            }
            let g = math::pow(x as f64, 1.0 / q as f64) as u128;
            // Start above the root; Newton then descends monotonically onto the floor.
            let mut m = g + (g >> 40) + 2;
            loop {
                let div = match checked_pow_u128(m, q - 1) {
                    Some(v) => x / v,
                    None => 0,
                };
                let next = ((q as u128 - 1) * m + div) / q as u128;
                if next >= m {
                    break;
                }
                m = next;
            }
            while checked_pow_u128(m, q).is_none_or(|v| v > x) {
                m -= 1;
            }
            m
        }
    }
}

/// Move `guess` onto `floor(x^(1/q))` by unit steps. Cheap when the guess is within a few units.
#[inline]
pub fn adjust_root_u128(x: u128, q: u32, mut guess: u128) -> u128 {
    while checked_pow_u128(guess, q).is_none_or(|v| v > x) {
        guess -= 1;
    }
    while checked_pow_u128(guess + 1, q).is_some_and(|v| v <= x) {
        guess += 1;
    }
    guess
}

/// `Some(a)` when `n = a^q` exactly.
pub fn perfect_root(n: u64, q: u32) -> Option<u64> {
    let a = iroot_u128(n as u128, q);
    (checked_pow_u128(a, q) == Some(n as u128)).then_some(a as u64)
}

pub fn floor_root(x: &BigUint, q: u32) -> BigUint {
    if q == 1 {
        x.clone()
    } else {
        x.nth_root(q)
    }
}

pub fn ceil_root(x: &BigUint, q: u32) -> BigUint {
    let r = floor_root(x, q);
    if r.pow(q) == *x {
        r
    } else {
        r + 1u32
    }
}

fn floor_shr(x: &BigUint, k: u64) -> BigUint {
    x >> k
}

fn ceil_shr(x: &BigUint, k: u64) -> BigUint {
    let f = x >> k;
    if (&f << k) == *x {
        f
    } else {
        f + 1u32
    }
}

fn floor_shr_i(x: &BigInt, k: u64) -> BigInt {
    match x.sign() {
        Sign::Minus => -BigInt::from(ceil_shr(x.magnitude(), k)),
        _ => BigInt::from(floor_shr(x.magnitude(), k)),
    }
}

fn ceil_shr_i(x: &BigInt, k: u64) -> BigInt {
    match x.sign() {
        Sign::Minus => -BigInt::from(floor_shr(x.magnitude(), k)),
        _ => BigInt::from(ceil_shr(x.magnitude(), k)),
    }
}

/// `floor((v / 2^s)^(a/b) * 2^s)` for `v >= 0`.
pub fn pow_scaled_floor(v: &BigUint, s: u32, a: u32, b: u32) -> BigUint {
    let x = v.pow(a);
    let (s, a, b) = (s as u64, a as u64, b as u64);
    let x = if b >= a { x << (s * (b - a)) } else { floor_shr(&x, s * (a - b)) };
    floor_root(&x, b as u32)
}

/// `ceil((v / 2^s)^(a/b) * 2^s)` for `v >= 0`.
pub fn pow_scaled_ceil(v: &BigUint, s: u32, a: u32, b: u32) -> BigUint {
    let x = v.pow(a);
    let (s, a, b) = (s as u64, a as u64, b as u64);
    let x = if b >= a { x << (s * (b - a)) } else { ceil_shr(&x, s * (a - b)) };
    ceil_root(&x, b as u32)
}

/// A closed interval `[lo, hi] * 2^-shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    shift: u32,
}

impl Dyadic {
    pub fn point_u64(v: u64, shift: u32) -> Self {
        let x = BigInt::from(v) << shift as u64;
        Dyadic { lo: x.clone(), hi: x, shift }
    }

    /// Exact enclosure of a finite double, rounded outward to `shift` fractional bits.
    pub fn from_f64(x: f64, shift: u32) -> Self {
        assert!(x.is_finite(), "non-finite value");
        if x == 0.0 {
            return Dyadic { lo: BigInt::zero(), hi: BigInt::zero(), shift };
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigInt::from(mant);
        let total = e + shift as i64;
        let (lo, hi) = if total >= 0 {
            let v = m << total as u64;
            (v.clone(), v)
        } else {
            let k = (-total) as u64;
            (floor_shr_i(&m, k), ceil_shr_i(&m, k))
        };
        if neg {
            Dyadic { lo: -hi, hi: -lo, shift }
        } else {
            Dyadic { lo, hi, shift }
        }
    }

    pub fn from_bounds(lo: BigInt, hi: BigInt, shift: u32) -> Self {
        debug_assert!(lo <= hi);
        Dyadic { lo, hi, shift }
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lower(&self) -> Dyadic {
        Dyadic { lo: self.lo.clone(), hi: self.lo.clone(), shift: self.shift }
    }

    pub fn upper(&self) -> Dyadic {
        Dyadic { lo: self.hi.clone(), hi: self.hi.clone(), shift: self.shift }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        assert_eq!(self.shift, o.shift);
        Dyadic { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, shift: self.shift }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        assert_eq!(self.shift, o.shift);
        Dyadic { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, shift: self.shift }
    }

    pub fn add_u64(&self, v: u64) -> Dyadic {
        self.add(&Dyadic::point_u64(v, self.shift))
    }

    pub fn mul_u64(&self, v: u64) -> Dyadic {
        Dyadic { lo: &self.lo * v, hi: &self.hi * v, shift: self.shift }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        assert_eq!(self.shift, o.shift);
        let cands = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        let k = self.shift as u64;
        Dyadic { lo: floor_shr_i(min, k), hi: ceil_shr_i(max, k), shift: self.shift }
    }

    /// `1 / self` for a strictly positive interval.
    pub fn recip(&self) -> Option<Dyadic> {
        if !self.lo.is_positive() {
            return None;
        }
        let one = BigInt::one() << (2 * self.shift as u64);
        let lo = &one / &self.hi;
        let hi = {
            let q = &one / &self.lo;
            if &q * &self.lo == one {
                q
            } else {
                q + 1
            }
        };
        Some(Dyadic { lo, hi, shift: self.shift })
    }

    /// `self^(a/b)` for a nonnegative interval; `a` may be negative.
    pub fn pow_ratio(&self, a: i64, b: u32) -> Option<Dyadic> {
        if self.lo.is_negative() {
            return None;
        }
        let ua = a.unsigned_abs() as u32;
        let lo = pow_scaled_floor(self.lo.magnitude(), self.shift, ua, b);
        let hi = pow_scaled_ceil(self.hi.magnitude(), self.shift, ua, b);
        let r = Dyadic { lo: BigInt::from(lo), hi: BigInt::from(hi), shift: self.shift };
        if a >= 0 {
            Some(r)
        } else {
            r.recip()
        }
    }

    /// Division by a positive integer, rounded outward.
    pub fn div_u64(&self, v: u64) -> Dyadic {
        assert!(v > 0);
        let v = BigInt::from(v);
        let fl = |x: &BigInt| num_integer::Integer::div_floor(x, &v);
        let ce = |x: &BigInt| -num_integer::Integer::div_floor(&-x, &v);
        Dyadic { lo: fl(&self.lo), hi: ce(&self.hi), shift: self.shift }
    }

    /// Compare with the integer `t`; `None` when the enclosure straddles it.
    pub fn cmp_u64(&self, t: u64) -> Option<Ordering> {
        self.cmp_int(&(BigInt::from(t) << self.shift as u64))
    }

    fn cmp_int(&self, scaled: &BigInt) -> Option<Ordering> {
        if &self.hi < scaled {
            Some(Ordering::Less)
        } else if &self.lo > scaled {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Outward-rounded double bounds.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        let s = -(self.shift as i32);
        let lo = libm::ldexp(self.lo.to_f64().unwrap_or(f64::NEG_INFINITY), s);
        let hi = libm::ldexp(self.hi.to_f64().unwrap_or(f64::INFINITY), s);
        if self.is_point() && is_exact(&self.lo) {
            return (lo, hi);
        }
        (lo.next_down(), hi.next_up())
    }

    /// Integer part of the lower endpoint (`floor(lo)`).
    pub fn floor_lo(&self) -> BigInt {
        floor_shr_i(&self.lo, self.shift as u64)
    }

    pub fn floor_hi(&self) -> BigInt {
        floor_shr_i(&self.hi, self.shift as u64)
    }

    /// Subtract the integer `m` exactly.
    pub fn sub_int(&self, m: &BigInt) -> Dyadic {
        let v = m << self.shift as u64;
        Dyadic { lo: &self.lo - &v, hi: &self.hi - &v, shift: self.shift }
    }
}

/// Whether `x` has at most 53 significant bits (so converts to a double exactly).
fn is_exact(x: &BigInt) -> bool {
    let m = x.magnitude();
    m.bits() - m.trailing_zeros().unwrap_or(0) <= 53
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        assert_eq!(iroot_u128(8, 3), 2);
        assert_eq!(iroot_u128(26, 3), 2);
        assert_eq!(iroot_u128(27, 3), 3);
        assert_eq!(iroot_u128(u128::MAX, 2), u64::MAX as u128);
        assert_eq!(iroot_u128(u128::MAX, 5), 50_859_008);
        for x in [0u128, 1, 2, 3, 1 << 100, (1 << 100) - 1, 10u128.pow(30) + 7] {
            for q in 1..8 {
                let r = iroot_u128(x, q);
                assert!(checked_pow_u128(r, q).unwrap() <= x);
                assert!(checked_pow_u128(r + 1, q).is_none_or(|v| v > x));
            }
        }
        assert_eq!(perfect_root(4096, 3), Some(16));
        assert_eq!(perfect_root(4097, 3), None);
    }

    #[test]
    fn f64_enclosure_is_exact_when_representable() {
        let d = Dyadic::from_f64(0.75, 8);
        assert!(d.is_point());
        assert_eq!(d.to_f64_bounds(), (0.75, 0.75));
        let d = Dyadic::from_f64(0.1, 8);
        let (lo, hi) = d.to_f64_bounds();
        assert!(lo < 0.1 && 0.1 < hi);
        let d = Dyadic::from_f64(-2.5, 4);
        assert_eq!(d.to_f64_bounds(), (-2.5, -2.5));
    }

    #[test]
    fn pow_enclosures() {
        // 2^(3/2) = 2.828427...
        let two = Dyadic::point_u64(2, 64);
        let (lo, hi) = two.pow_ratio(3, 2).unwrap().to_f64_bounds();
        assert!(lo <= 2.0f64.powf(1.5) && 2.0f64.powf(1.5) <= hi);
        assert!(hi - lo < 1e-15);
        // 4^(3/2) = 8 exactly
        let four = Dyadic::point_u64(4, 64);
        assert_eq!(four.pow_ratio(3, 2).unwrap().cmp_u64(8), Some(Ordering::Equal));
        // 2^(-2) = 0.25 exactly
        let q = two.pow_ratio(-2, 1).unwrap();
        assert_eq!(q.to_f64_bounds(), (0.25, 0.25));
        let (lo, hi) = Dyadic::point_u64(3, 80).pow_ratio(-1, 2).unwrap().to_f64_bounds();
        let t = 1.0 / 3.0f64.sqrt();
        assert!(lo <= t && t <= hi);
    }

    #[test]
    fn mul_handles_signs() {
        let a = Dyadic::from_f64(-1.5, 10);
        let b = Dyadic::from_f64(2.25, 10);
        assert_eq!(a.mul(&b).to_f64_bounds(), (-3.375, -3.375));
        let r = Dyadic::from_f64(4.0, 10).recip().unwrap();
        assert_eq!(r.to_f64_bounds(), (0.25, 0.25));
    }
}
