//! Certified comparisons of `(u + v)^alpha - u^alpha` against a real target.
//!
//! Three tiers are tried in order:
//! 1. double precision with an explicit error budget (assumes `libm::pow`
//!    and friends are accurate to a few ulps; the budget is `2^-40` relative),
//! 2. exact integer arithmetic when `u` and `u + v` are perfect `q`-th powers
//!    (the only case in which the gap can equal an integer),
//! 3. fixed-point big-integer enclosures on the precision ladder.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use crate::alpha::AlphaContext;
use crate::certreal::exact::{checked_pow_u128, perfect_root, Dyadic};
use crate::error::{Error, Result};
use crate::math;

/// Relative error budget of one double-precision kernel evaluation.
pub const F64_REL_ERR: f64 = 9.094947017729282e-13; // 2^-40

/// `coef * prod(base_i ^ (num_i / den_i))` with positive integer bases.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMonomial {
    pub coef: f64,
    pub factors: Vec<(u64, i64, u32)>,
}

impl PowerMonomial {
    pub fn new(coef: f64) -> Self {
        PowerMonomial { coef, factors: Vec::new() }
    }

    pub fn times_pow(mut self, base: u64, num: i64, den: u32) -> Self {
        assert!(base > 0 && den > 0);
        self.factors.push((base, num, den));
        self
    }

    /// Double-precision value and an absolute error bound.
    pub fn approx(&self) -> (f64, f64) {
        let mut v = self.coef;
        for &(b, n, d) in &self.factors {
            v *= math::pow(b as f64, n as f64 / d as f64);
        }
        (v, v.abs() * F64_REL_ERR * (1 + self.factors.len()) as f64)
    }

    pub fn enclose(&self, bits: u32) -> Dyadic {
        let mut acc = Dyadic::from_f64(self.coef, bits);
        for &(b, n, d) in &self.factors {
            let f = Dyadic::point_u64(b, bits).pow_ratio(n, d).expect("positive base");
            acc = acc.mul(&f);
        }
        acc
    }

    /// Certified comparison with a real target.
    pub fn cmp_f64(&self, t: f64, ctx: &AlphaContext) -> Result<Ordering> {
        let (v, e) = self.approx();
        if v - e > t {
            return Ok(Ordering::Greater);
        }
        if v + e < t {
            return Ok(Ordering::Less);
        }
        let mut last = ctx.policy.initial_bits;
        for bits in ctx.policy.ladder() {
            last = bits;
            let c = self.enclose(bits);
            if let Some(o) = cmp_dyadic_f64(&c, t, bits) {
                return Ok(o);
            }
        }
        Err(Error::PrecisionExhausted { bits: last, n: None, r: None, d: None })
    }
}

fn cmp_dyadic_f64(x: &Dyadic, t: f64, bits: u32) -> Option<Ordering> {
    let td = Dyadic::from_f64(t, bits);
    if x.hi_raw() < td.lo_raw() {
        Some(Ordering::Less)
    } else if x.lo_raw() > td.hi_raw() {
        Some(Ordering::Greater)
    } else if x.is_point() && td.is_point() && x.lo_raw() == td.lo_raw() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// An argument of the power gap.
#[derive(Debug, Clone, Copy)]
pub enum Arg<'a> {
    Int(u64),
    /// An exactly representable double.
    Real(f64),
    /// `k - c` for a certified constant `c`.
    IntMinus(u64, &'a PowerMonomial),
}

impl Arg<'_> {
    fn approx(&self) -> (f64, f64) {
        match *self {
            Arg::Int(k) => {
                let v = k as f64;
                (v, if k < (1 << 53) { 0.0 } else { v * f64::EPSILON })
            }
            Arg::Real(x) => (x, 0.0),
            Arg::IntMinus(k, c) => {
                let (cv, ce) = c.approx();
                let v = k as f64 - cv;
                (v, ce + v.abs() * f64::EPSILON + if k < (1 << 53) { 0.0 } else { k as f64 * f64::EPSILON })
            }
        }
    }

    fn enclose(&self, bits: u32) -> Dyadic {
        match *self {
            Arg::Int(k) => Dyadic::point_u64(k, bits),
            Arg::Real(x) => Dyadic::from_f64(x, bits),
            Arg::IntMinus(k, c) => Dyadic::point_u64(k, bits).sub(&c.enclose(bits)),
        }
    }
}

/// Double-precision `(u + v)^alpha - u^alpha` with an absolute error bound.
pub fn power_gap_approx(u: f64, eu: f64, v: f64, ev: f64, alpha: f64) -> (f64, f64) {
    let val = math::shifted_power_gap(u.max(0.0), v.max(0.0), alpha);
    let slope = alpha * math::pow((u + v + eu + ev).max(0.0), alpha - 1.0);
    (val, val.abs() * F64_REL_ERR + slope * (eu + ev) * (1.0 + F64_REL_ERR))
}

/// Exact value of the gap when both `u` and `u + v` are perfect `q`-th powers.
fn exact_gap(u: u64, v: u64, ctx: &AlphaContext) -> Option<BigUint> {
    let e = ctx.exponent();
    let (p, q) = (e.numer(), e.denom());
    let a = perfect_root(u, q)?;
    let b = perfect_root(u.checked_add(v)?, q)?;
    match (checked_pow_u128(a as u128, p), checked_pow_u128(b as u128, p)) {
        (Some(x), Some(y)) => Some(BigUint::from(y - x)),
        _ => Some(BigUint::from(b).pow(p) - BigUint::from(a).pow(p)),
    }
}

/// Certified enclosure of `(u + v)^alpha - u^alpha` at `bits` fractional bits.
///
/// The gap is increasing in both arguments, so the bounds come from the
/// lower and upper corners of the argument box.
pub fn power_gap_enclosure(u: &Dyadic, v: &Dyadic, ctx: &AlphaContext) -> Option<Dyadic> {
    let e = ctx.exponent();
    let (p, q) = (e.numer() as i64, e.denom());
    let corner = |u: Dyadic, v: Dyadic| -> Option<Dyadic> {
        let a = u.add(&v).pow_ratio(p, q)?;
        let b = u.pow_ratio(p, q)?;
        Some(a.sub(&b))
    };
    let lo = corner(u.lower(), v.lower())?;
    let hi = corner(u.upper(), v.upper())?;
    Some(Dyadic::from_bounds(lo.lo_raw().clone(), hi.hi_raw().clone(), u.shift()))
}

/// Compare `(u + v)^alpha - u^alpha` with `t`. Both arguments must be nonnegative.
pub fn cmp_power_gap(ctx: &AlphaContext, u: Arg<'_>, v: Arg<'_>, t: f64) -> Result<Ordering> {
    let (uf, eu) = u.approx();
    let (vf, ev) = v.approx();
    let (val, err) = power_gap_approx(uf, eu, vf, ev, ctx.alpha());
    if val - err > t {
        return Ok(Ordering::Greater);
    }
    if val + err < t {
        return Ok(Ordering::Less);
    }
    if let (Arg::Int(a), Arg::Int(b)) = (u, v) {
        if let Some(exact) = exact_gap(a, b, ctx) {
            if math::floor(t) == t && t >= 0.0 {
                return Ok(exact.cmp(&BigUint::from(t as u128)));
            }
        }
    }
    let mut last = ctx.policy.initial_bits;
    for bits in ctx.policy.ladder() {
        last = bits;
        let ud = u.enclose(bits);
        let vd = v.enclose(bits);
        if ud.lo_raw().sign() == num_bigint::Sign::Minus || vd.lo_raw().sign() == num_bigint::Sign::Minus {
            return Err(Error::Domain("power gap arguments must be nonnegative"));
        }
        let g = power_gap_enclosure(&ud, &vd, ctx).ok_or(Error::Domain("power gap arguments must be nonnegative"))?;
        match cmp_dyadic_f64(&g, t, bits) {
            // Equality can only be certified on the exact path above.
            Some(Ordering::Equal) if !matches!((u, v), (Arg::Int(_), Arg::Int(_))) => {}
            Some(o) => return Ok(o),
            None => {}
        }
    }
    Err(Error::PrecisionExhausted { bits: last, n: None, r: None, d: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> AlphaContext {
        AlphaContext::parse(s).unwrap()
    }

    #[test]
    fn exact_integer_gaps() {
        let c = ctx("1.5");
        // 4^(3/2) - 1^(3/2) = 7 exactly
        assert_eq!(cmp_power_gap(&c, Arg::Int(1), Arg::Int(3), 7.0).unwrap(), Ordering::Equal);
        assert_eq!(cmp_power_gap(&c, Arg::Int(1), Arg::Int(3), 6.0).unwrap(), Ordering::Greater);
        // 0^a -> r^a: 2^(3/2) is irrational
        assert_eq!(cmp_power_gap(&c, Arg::Int(0), Arg::Int(2), 2.8284271247461903).unwrap(), Ordering::Less);
    }

    #[test]
    fn monomial_threshold() {
        let c = ctx("1.5");
        let m = PowerMonomial::new(2.0).times_pow(4, 1, 2); // 2 * sqrt(4) = 4
        assert_eq!(m.cmp_f64(4.0, &c).unwrap(), Ordering::Equal);
        let m = PowerMonomial::new(1.0).times_pow(2, -1, 2); // 1/sqrt(2)
        assert_eq!(m.cmp_f64(0.7071067811865476, &c).unwrap(), Ordering::Less);
    }

    #[test]
    fn ladder_resolves_near_ties() {
        let c = ctx("1.5");
        // (1 + 1 - 1e-15 ... ) style: compare against a value within f64 noise of the true gap.
        let t = math::shifted_power_gap(10.0, 1.0, 1.5);
        let o = cmp_power_gap(&c, Arg::Int(10), Arg::Int(1), t).unwrap();
        let exact = 11f64.powf(1.5) - 10f64.powf(1.5);
        assert!(o != Ordering::Equal);
        let _ = exact;
    }
}
