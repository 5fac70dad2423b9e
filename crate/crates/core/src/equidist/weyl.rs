use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::alpha::AlphaContext;
use crate::equidist::phase::{check_budget, PairwiseSum, PhaseStream};
use crate::error::{Error, Result};
use crate::math;

/// A short window `[M, N)` with `M = ceil(((d + c1)/(r alpha))^beta)` and
/// `N = ceil(((d + c2)/(r alpha))^beta)`, where `c2 - c1` is a positive integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub r: u64,
    pub d: u64,
    pub c1: f64,
    pub c2: f64,
    pub m: u64,
    pub n: u64,
}

/// `x = num / 2^shift` exactly.
fn dyadic_parts(x: f64) -> (BigInt, u32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let mant = if x < 0.0 { -BigInt::from(mant) } else { BigInt::from(mant) };
    if e >= 0 {
        (mant << e as u64, 0)
    } else {
        (mant, (-e) as u32)
    }
}

/// `ceil(((d + c) / (r alpha))^beta)`, decided with integer arithmetic.
fn window_end(ctx: &AlphaContext, d: u64, c: f64, r: u64) -> Result<u64> {
    let e = ctx.exponent();
    let (p, q) = (e.numer(), e.denom());
    let b = p - q;
    let (num, s) = dyadic_parts(c);
    let a = (BigInt::from(d) << s as u64) + num;
    if a <= BigInt::zero() {
        return Err(Error::Domain("window needs d + c > 0"));
    }
    // M >= ((a q) / (2^s r p))^(q/b)  <=>  M^b (2^s r p)^q >= (a q)^q
    let lhs_unit = ((BigInt::one() << s as u64) * BigInt::from(r) * BigInt::from(p)).pow(q);
    let rhs = (a * BigInt::from(q)).pow(q);
    let ok = |m: u64| BigInt::from(m).pow(b) * &lhs_unit >= rhs;
    let x = (d as f64 + c) / (r as f64 * ctx.alpha());
    let guess = math::pow(x, ctx.beta());
    if !(guess < 1.8e19) {
        return Err(Error::Domain("window end exceeds 64 bits"));
    }
    let mut m = math::ceil(guess) as u64;
    while m > 0 && ok(m - 1) {
        m -= 1;
    }
    while !ok(m) {
        m += 1;
    }
    Ok(m)
}

impl WindowSpec {
    pub fn new(ctx: &AlphaContext, r: u64, d: u64, c1: f64, c2: f64) -> Result<Self> {
        if r == 0 || d == 0 {
            return Err(Error::Domain("window needs r >= 1 and d >= 1"));
        }
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(Error::Domain("window constants must be finite"));
        }
        let diff = c2 - c1;
        let nearest = math::floor(diff + 0.5);
        let slack = 4.0 * f64::EPSILON * (c1.abs().max(c2.abs()) + 1.0);
        if nearest < 1.0 || (diff - nearest).abs() > slack {
            return Err(Error::Domain("c2 - c1 must be a positive integer"));
        }
        let m = window_end(ctx, d, c1, r)?;
        let n = window_end(ctx, d, c2, r)?;
        Ok(WindowSpec { r, d, c1, c2, m, n })
    }

    pub fn len(&self) -> u64 {
        self.n.saturating_sub(self.m)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check(&self) -> Result<()> {
        if self.n <= self.m {
            return Err(Error::DegenerateWindow { m: self.m, n: self.n });
        }
        Ok(())
    }
}

/// `sum_{start <= n < end} e(h1 n^alpha + h2r alpha n^(alpha-1))` as `(re, im)`.
pub fn exp_sum(ctx: &AlphaContext, start: u64, end: u64, h1: i64, h2r: i64) -> Result<(f64, f64)> {
    let mut acc = PairwiseSum::default();
    for p in PhaseStream::new(ctx, start, end) {
        let (ph, err) = p.phase(h1, h2r);
        check_budget(err)?;
        let (s, c) = math::sin_cos(TAU * ph);
        acc.push(c, s);
    }
    Ok(acc.finish())
}

/// `|(1/(N-M)) sum_{M <= n < N} e(h1 n^alpha + h2 r alpha n^(alpha-1))|`.
pub fn weyl_sum(ctx: &AlphaContext, w: &WindowSpec, h1: i64, h2: i64) -> Result<f64> {
    w.check()?;
    if h1 == 0 && h2 == 0 {
        return Ok(1.0);
    }
    let h2r = h2.checked_mul(w.r as i64).ok_or(Error::Domain("harmonic too large"))?;
    let (re, im) = exp_sum(ctx, w.m, w.n, h1, h2r)?;
    Ok((math::hypot(re, im) / w.len() as f64).min(1.0))
}

fn check_shape_args(len: f64, lambda: f64, c: f64) -> Result<()> {
    if !(len >= 1.0 && lambda > 0.0 && c >= 1.0) || !len.is_finite() || !lambda.is_finite() {
        return Err(Error::Domain("need |I| >= 1, lambda > 0 and c >= 1"));
    }
    Ok(())
}

/// Second-derivative test shape `|I| lambda2^(1/2) + lambda2^(-1/2)`.
///
/// `c` (the ratio bound on `f''`) only enters the implied constant, which is
/// measured rather than assumed.
pub fn vdc_bound(len: f64, lambda2: f64, c: f64) -> Result<f64> {
    check_shape_args(len, lambda2, c)?;
    let s = math::sqrt(lambda2);
    Ok(len * s + 1.0 / s)
}

/// Third-derivative test shape `|I| lambda3^(1/6) + lambda3^(-1/3)`.
pub fn sargos_bound(len: f64, lambda3: f64, c: f64) -> Result<f64> {
    check_shape_args(len, lambda3, c)?;
    Ok(len * math::pow(lambda3, 1.0 / 6.0) + math::pow(lambda3, -1.0 / 3.0))
}

/// Measured `|sum e(n^alpha)|` over `[start, 2 start)` against both shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeTestRow {
    pub start: u64,
    pub len: u64,
    pub measured: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// `max |f''| / min |f''|` on the interval.
    pub c2: f64,
    /// `max |f'''| / min |f'''|` on the interval.
    pub c3: f64,
    pub vdc_shape: f64,
    pub sargos_shape: f64,
}

impl DerivativeTestRow {
    pub fn vdc_constant(&self) -> f64 {
        self.measured / self.vdc_shape
    }

    pub fn sargos_constant(&self) -> f64 {
        self.measured / self.sargos_shape
    }
}

pub fn derivative_test_scan(ctx: &AlphaContext, starts: &[u64]) -> Result<Vec<DerivativeTestRow>> {
    let a = ctx.alpha();
    starts
        .iter()
        .map(|&start| {
            if start == 0 {
                return Err(Error::Domain("dyadic range must start at n >= 1"));
            }
            let (lo, hi) = (start as f64, 2.0 * start as f64);
            // |f''| and |f'''| are decreasing for 1 < alpha < 2.
            let lambda2 = a * (a - 1.0) * math::pow(hi, a - 2.0);
            let lambda3 = (a * (a - 1.0) * (a - 2.0)).abs() * math::pow(hi, a - 3.0);
            let c2 = math::pow(hi / lo, 2.0 - a);
            let c3 = math::pow(hi / lo, 3.0 - a);
            let (re, im) = exp_sum(ctx, start, 2 * start, 1, 0)?;
            Ok(DerivativeTestRow {
                start,
                len: start,
                measured: math::hypot(re, im),
                lambda2,
                lambda3,
                c2,
                c3,
                vdc_shape: vdc_bound(start as f64, lambda2, c2)?,
                sargos_shape: sargos_bound(start as f64, lambda3, c3)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> AlphaContext {
        AlphaContext::parse(s).unwrap()
    }

    #[test]
    fn window_endpoints() {
        let c = ctx("1.5");
        // ((d + c)/1.5)^2 with d = 3: c = 0 -> 4 exactly, c = 1 -> 64/9 = 7.1 -> 8
        let w = WindowSpec::new(&c, 1, 3, 0.0, 1.0).unwrap();
        assert_eq!((w.m, w.n), (4, 8));
        let w = WindowSpec::new(&c, 1, 1_000_000, 0.0, 1.0).unwrap();
        let x = (1e6f64 / 1.5).powi(2);
        assert!((w.m as f64 - x).abs() < 2.0);
        assert!(w.len() > 800_000 && w.len() < 900_000);
        assert!(WindowSpec::new(&c, 1, 10, 0.0, 1.5).is_err());
        assert!(WindowSpec::new(&c, 1, 10, 0.5, 0.5).is_err());
        assert!(WindowSpec::new(&c, 1, 10, 0.1, 1.1).is_ok());
    }

    #[test]
    fn trivial_harmonic_and_degenerate() {
        let c = ctx("1.5");
        let w = WindowSpec::new(&c, 1, 1000, 0.0, 1.0).unwrap();
        assert_eq!(weyl_sum(&c, &w, 0, 0).unwrap(), 1.0);
        let s = weyl_sum(&c, &w, 1, 0).unwrap();
        assert!((0.0..=1.0).contains(&s));
        let bad = WindowSpec { n: w.m, ..w };
        assert!(matches!(weyl_sum(&c, &bad, 1, 0), Err(Error::DegenerateWindow { .. })));
    }

    #[test]
    fn shapes() {
        assert!((vdc_bound(100.0, 1e-4, 1.0).unwrap() - 101.0).abs() < 1e-9);
        assert!((sargos_bound(1000.0, 1e-6, 1.0).unwrap() - 200.0).abs() < 1e-9);
        let l2: f64 = 1e-6;
        let v = vdc_bound(l2.powf(-0.5), l2, 1.0).unwrap();
        assert!((v - (1.0 + 1.0 / l2.sqrt())).abs() < 1e-9);
        let l3: f64 = 1e-9;
        let s = sargos_bound(l3.powf(-0.5), l3, 1.0).unwrap();
        assert!((s - 2.0 * l3.powf(-1.0 / 3.0)).abs() < 1e-6 * s);
        assert!(vdc_bound(0.5, 1.0, 1.0).is_err());
        assert!(sargos_bound(10.0, 0.0, 1.0).is_err());
        assert!(vdc_bound(10.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn dyadic_scan_has_a_common_constant() {
        let c = ctx("1.5");
        let rows = derivative_test_scan(&c, &[10_000, 20_000, 40_000]).unwrap();
        let k = rows.iter().map(|r| r.vdc_constant()).fold(0.0, f64::max);
        for r in &rows {
            assert!(r.measured <= k * r.vdc_shape);
            assert!(r.vdc_constant() < 10.0 && r.sargos_constant() < 10.0);
        }
    }
}
