//! `zeta(s)` for real `s > 1` by direct summation plus an Euler–Maclaurin tail.

use crate::alpha::AlphaContext;
use crate::error::{Error, Result};
use crate::math;

const DIRECT_TERMS: u64 = 10_000;

/// `B_2, B_4, B_6, B_8` divided by the matching factorial, then `B_10 / 10!`
/// which bounds the remainder.
const BERNOULLI_OVER_FACT: [f64; 5] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
];

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Tail `sum_{n >= N} n^-s` and a bound on its truncation error.
fn em_tail(s: f64, n: f64) -> (f64, f64) {
    let mut acc = Neumaier::default();
    acc.add(math::pow(n, 1.0 - s) / (s - 1.0));
    acc.add(0.5 * math::pow(n, -s));
    // rising = s (s+1) ... (s + 2j - 2)
    let mut rising = s;
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate().take(4) {
        let e = -s - (2 * j + 1) as f64;
        acc.add(b * rising * math::pow(n, e));
        rising *= (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64);
    }
    let rem = BERNOULLI_OVER_FACT[4].abs() * rising * math::pow(n, -s - 9.0);
    (acc.value(), rem)
}

/// `zeta(beta)` with `|result - zeta(beta)| <= tol`.
pub fn zeta(beta: f64, tol: f64) -> Result<f64> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain("zeta needs a real argument greater than 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let mut acc = Neumaier::default();
    // Smallest terms first.
    for n in (1..DIRECT_TERMS).rev() {
        acc.add(math::pow(n as f64, -beta));
    }
    let (tail, rem) = em_tail(beta, DIRECT_TERMS as f64);
    acc.add(tail);
    let v = acc.value();
    // Each power is good to a couple of ulps; summation is compensated.
    let rounding = 8.0 * f64::EPSILON * v;
    let bound = 2.0 * rem + rounding;
    if bound > tol {
        return Err(Error::Tolerance(tol));
    }
    Ok(v)
}

/// `beta alpha^-beta zeta(beta) / (k - 1)`.
pub fn asymptotic_constant(ctx: &AlphaContext, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain("progression length must be at least 2"));
    }
    let b = ctx.beta();
    let z = zeta(b, 1e-13)?;
    Ok(b * math::pow(ctx.alpha(), -b) * z / (k - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn closed_forms() {
        assert!((zeta(2.0, 1e-12).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta(4.0, 1e-12).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn apery() {
        // An independent oracle: plain summation to 2e6 terms plus the integral tail
        // and half the last term, good to about 1e-19 for s = 3.
        let n = 2_000_000u64;
        let mut s = 0.0;
        for k in (1..n).rev() {
            s += (k as f64).powi(-3);
        }
        let nf = n as f64;
        s += 0.5 / (nf * nf) + 0.5 * nf.powi(-3);
        let z = zeta(3.0, 1e-10).unwrap();
        assert!((z - s).abs() < 1e-11, "{z} vs {s}");
        assert!((z - 1.2020569031595942).abs() < 1e-14);
    }

    #[test]
    fn small_beta_and_domain() {
        assert!(zeta(1.0, 1e-12).is_err());
        assert!(zeta(0.5, 1e-12).is_err());
        assert!(zeta(2.0, 1e-30).is_err());
        // beta = 1.4 sits near the top of the theorem's alpha range.
        assert!(zeta(1.4, 1e-12).unwrap() > 3.1);
    }

    #[test]
    fn constants() {
        let c = AlphaContext::parse("1.5").unwrap();
        let k2 = asymptotic_constant(&c, 2).unwrap();
        assert!((k2 - 2.0 / 2.25 * PI * PI / 6.0).abs() < 1e-14);
        assert!((k2 - 1.4621636).abs() < 1e-7);
        assert_eq!(asymptotic_constant(&c, 3).unwrap(), k2 / 2.0);
        assert_eq!(asymptotic_constant(&c, 2).unwrap().to_bits(), k2.to_bits());
        assert!(asymptotic_constant(&c, 1).is_err());
    }
}
