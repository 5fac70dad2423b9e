use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::equidist::PairwiseSum;
use crate::error::{Error, Result};
use crate::math;

fn fracs(points: &[f64]) -> Vec<f64> {
    points.iter().map(|&x| x - math::floor(x)).collect()
}

/// Extreme discrepancy `sup_{[a,b)} |#{x_i in [a,b)}/N - (b - a)|` of the fractional parts.
///
/// With sorted values, `D = max_i (i/N - x_(i)) + max_i (x_(i) - (i-1)/N)`.
pub fn discrepancy_exact(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut x = fracs(points);
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let (mut above, mut below) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, &v) in x.iter().enumerate() {
        above = above.max((i + 1) as f64 / n - v);
        below = below.max(v - i as f64 / n);
    }
    Ok((above + below).min(1.0))
}

/// `|(1/N) sum e(h x_n)|` for `h = 1..=H`.
pub fn harmonic_magnitudes(points: &[f64], big_h: u32) -> Result<BTreeMap<u32, f64>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let x = fracs(points);
    let n = x.len() as f64;
    Ok((1..=big_h)
        .map(|h| {
            let mut s = PairwiseSum::default();
            for &v in &x {
                let t = h as f64 * v;
                let (sn, cs) = math::sin_cos(TAU * (t - math::floor(t)));
                s.push(cs, sn);
            }
            let (re, im) = s.finish();
            (h, (math::hypot(re, im) / n).min(1.0))
        })
        .collect())
}

fn etk_from(harmonics: &BTreeMap<u32, f64>, big_h: u32) -> f64 {
    let tail: f64 = harmonics.iter().map(|(&h, &m)| m / h as f64).sum();
    3.0 * (1.0 / (big_h as f64 + 1.0) + tail)
}

/// `3 (1/(H+1) + sum_{h<=H} |(1/N) sum e(h x_n)| / h)`.
pub fn etk_bound(points: &[f64], big_h: u32) -> Result<f64> {
    if big_h == 0 {
        return Err(Error::Domain("H must be at least 1"));
    }
    Ok(etk_from(&harmonic_magnitudes(points, big_h)?, big_h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub n_points: usize,
    pub exact_discrepancy: f64,
    pub etk_bound: f64,
    pub harmonics: BTreeMap<u32, f64>,
    pub big_h: u32,
}

impl DiscrepancyReport {
    /// `exact / bound`; at most 1 whenever the ETK inequality holds with constant 3.
    pub fn ratio(&self) -> f64 {
        self.exact_discrepancy / self.etk_bound
    }
}

pub fn discrepancy_report(points: &[f64], big_h: u32) -> Result<DiscrepancyReport> {
    if big_h == 0 {
        return Err(Error::Domain("H must be at least 1"));
    }
    let harmonics = harmonic_magnitudes(points, big_h)?;
    Ok(DiscrepancyReport {
        n_points: points.len(),
        exact_discrepancy: discrepancy_exact(points)?,
        etk_bound: etk_from(&harmonics, big_h),
        harmonics,
        big_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::discrepancy_brute;
    use rand::{Rng, SeedableRng};

    #[test]
    fn spec_examples() {
        assert_eq!(discrepancy_exact(&[0.0, 0.25, 0.5, 0.75]).unwrap(), 0.25);
        assert_eq!(discrepancy_exact(&[0.5]).unwrap(), 1.0);
        let p = [0.1, 0.2, 0.9];
        assert!((discrepancy_exact(&p).unwrap() - discrepancy_brute(&p)).abs() < 1e-15);
        assert_eq!(discrepancy_exact(&[]), Err(Error::EmptyInput));
        assert!((etk_bound(&[0.5], 1).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn equally_spaced() {
        for n in 2..=64u32 {
            let p: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            assert!((discrepancy_exact(&p).unwrap() - 1.0 / n as f64).abs() < 1e-15, "N={n}");
            assert!(etk_bound(&p, n - 1).unwrap() >= 1.0 / n as f64);
        }
    }

    #[test]
    fn random_sets_against_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=50);
            let p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 3.0 - 1.0).collect();
            let d = discrepancy_exact(&p).unwrap();
            assert!((d - discrepancy_brute(&p)).abs() < 1e-12);
            assert!(d >= 1.0 / n as f64 - 1e-15 && d <= 1.0);
            assert!(d <= etk_bound(&p, 8).unwrap());
        }
        let p: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let r = discrepancy_report(&p, 50).unwrap();
        assert!(r.exact_discrepancy <= r.etk_bound && r.ratio() <= 1.0);
        assert_eq!(r.harmonics.len(), 50);
    }
}
