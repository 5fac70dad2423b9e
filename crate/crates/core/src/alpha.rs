//! The exponent `alpha = p/q` and everything derived from it.

use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;

/// Largest numerator accepted; exact fallbacks raise integers to the `p`-th power.
pub const MAX_NUMERATOR: u64 = 100_000;

/// A rational exponent `p/q` in lowest terms with `1 < p/q < 2`.
///
/// Decimal inputs such as `1.7` are kept as the exact rational `17/10`, so
/// the integer paths see the number the user typed rather than its binary
/// rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    p: u32,
    q: u32,
}

impl Exponent {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let input = || alloc::format!("{p}/{q}");
        if q == 0 {
            return Err(Error::InvalidExponent { input: input(), reason: "zero denominator" });
        }
        let g = num_integer::gcd(p, q);
        let (p, q) = (p / g, q / g);
        if !(q < p && p < 2 * q) {
            return Err(Error::InvalidExponent { input: input(), reason: "alpha must lie strictly between 1 and 2" });
        }
        if p > MAX_NUMERATOR {
            return Err(Error::InvalidExponent { input: input(), reason: "numerator too large after reduction" });
        }
        Ok(Exponent { p: p as u32, q: q as u32 })
    }

    pub fn numer(&self) -> u32 {
        self.p
    }

    pub fn denom(&self) -> u32 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason| Error::InvalidExponent { input: s.to_string(), reason };
        if let Some((a, b)) = s.split_once('/') {
            let p = a.trim().parse::<u64>().map_err(|_| bad("numerator is not an integer"))?;
            let q = b.trim().parse::<u64>().map_err(|_| bad("denominator is not an integer"))?;
            return Exponent::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad("empty"));
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad("expected a decimal or p/q"));
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 12 {
            return Err(bad("too many decimal digits"));
        }
        let scale = 10u64.pow(frac.len() as u32);
        let int_v: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad("integer part overflow"))? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad("bad fraction"))? };
        let p = int_v
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(|| bad("overflow"))?;
        Exponent::new(p, scale)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Bit budget for certified decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
    /// Relative width targeted by the gap-function inverse.
    pub inverse_rel_tol: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { initial_bits: 64, max_bits: 4096, escalation_factor: 2, inverse_rel_tol: 1e-12 }
    }
}

impl PrecisionPolicy {
    /// The escalation ladder `initial, initial*f, ...` capped at `max_bits`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let f = self.escalation_factor.max(2);
        let max = self.max_bits.max(self.initial_bits);
        core::iter::successors(Some(self.initial_bits.max(8)), move |&b| {
            if b >= max {
                None
            } else {
                Some(b.saturating_mul(f).min(max))
            }
        })
    }
}

/// Where `alpha` sits relative to the thresholds of the asymptotic theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    /// `alpha < 1 + 1/sqrt(2)`
    pub below_sqrt2_threshold: bool,
    /// `alpha < (sqrt(21) + 4) / 5`
    pub in_theorem_range: bool,
    /// `alpha < (sqrt(10) + 2) / 3`
    pub below_e2_threshold: bool,
}

pub fn sqrt2_threshold() -> f64 {
    1.0 + 1.0 / math::sqrt(2.0)
}

pub fn theorem_threshold() -> f64 {
    (math::sqrt(21.0) + 4.0) / 5.0
}

pub fn e2_threshold() -> f64 {
    (math::sqrt(10.0) + 2.0) / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaContext {
    exponent: Exponent,
    alpha: f64,
    beta: f64,
    pub policy: PrecisionPolicy,
}

impl AlphaContext {
    pub fn new(exponent: Exponent) -> Self {
        let (p, q) = (exponent.p as f64, exponent.q as f64);
        AlphaContext { exponent, alpha: p / q, beta: q / (p - q), policy: PrecisionPolicy::default() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(s.parse()?))
    }

    pub fn with_policy(mut self, policy: PrecisionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1 / (alpha - 1)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `beta` as the exact rational `q / (p - q)`.
    pub fn beta_ratio(&self) -> (u32, u32) {
        let (p, q) = (self.exponent.p, self.exponent.q);
        (q, p - q)
    }

    /// Flags are derived on every call; they are never cached.
    pub fn regime_flags(&self) -> RegimeFlags {
        RegimeFlags {
            below_sqrt2_threshold: self.alpha < sqrt2_threshold(),
            in_theorem_range: self.alpha < theorem_threshold(),
            below_e2_threshold: self.alpha < e2_threshold(),
        }
    }

    /// `d^(beta-1)` in double precision; used for diagnostics only.
    pub fn growth(&self, d: f64) -> f64 {
        math::pow(d, self.beta - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_is_kept_exact() {
        let e: Exponent = "1.7".parse().unwrap();
        assert_eq!((e.numer(), e.denom()), (17, 10));
        let e: Exponent = "1.50".parse().unwrap();
        assert_eq!((e.numer(), e.denom()), (3, 2));
        let e: Exponent = " 12/10 ".parse().unwrap();
        assert_eq!((e.numer(), e.denom()), (6, 5));
    }

    #[test]
    fn rejects_out_of_range() {
        for s in ["2.5", "1", "2", "0.5", "abc", "", "3/2x", "1/0", "1.5.1"] {
            assert!(s.parse::<Exponent>().is_err(), "{s}");
        }
    }

    #[test]
    fn beta_and_flags() {
        let ctx = AlphaContext::parse("1.5").unwrap();
        assert_eq!(ctx.beta(), 2.0);
        assert_eq!(ctx.beta_ratio(), (2, 1));
        let f = ctx.regime_flags();
        assert!(f.below_sqrt2_threshold && f.in_theorem_range && f.below_e2_threshold);

        let ctx = AlphaContext::parse("1.72").unwrap();
        let f = ctx.regime_flags();
        assert!(!f.below_sqrt2_threshold && !f.in_theorem_range && f.below_e2_threshold);
        assert!((theorem_threshold() - 1.7165).abs() < 1e-3);
        assert!((e2_threshold() - 1.7208).abs() < 1e-3);
    }

    #[test]
    fn ladder_doubles_to_cap() {
        let p = PrecisionPolicy::default();
        let v: alloc::vec::Vec<u32> = p.ladder().collect();
        assert_eq!(v, [64, 128, 256, 512, 1024, 2048, 4096]);
    }
}
