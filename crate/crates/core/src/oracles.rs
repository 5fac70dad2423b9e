//! Slow reference implementations used to check the fast kernels.
//!
//! Nothing here shares code with the production paths: floors come from
//! `BigUint::nth_root` directly, derivatives from finite differences of a
//! plain bisection, and discrepancies from enumerating intervals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::alpha::{AlphaContext, Exponent};
use crate::equidist::ConvexRegion;

/// `floor(n^(p/q))` straight from an integer root.
pub fn floor_pow_big(n: u64, e: Exponent) -> BigUint {
    BigUint::from(n).pow(e.numer()).nth_root(e.denom())
}

/// `sup |#{x in [a, b)}/N - (b - a)|` over every interval whose endpoints are
/// 0, 1, a point, or just past a point.
pub fn discrepancy_brute(points: &[f64]) -> f64 {
    let x: Vec<f64> = points.iter().map(|v| v - libm::floor(*v)).collect();
    let mut ends: Vec<f64> = x.iter().flat_map(|&v| [v, v.next_up()]).collect();
    ends.extend([0.0, 1.0]);
    let n = x.len() as f64;
    let mut best = 0.0f64;
    for &a in &ends {
        for &b in &ends {
            if b < a {
                continue;
            }
            let c = x.iter().filter(|&&v| a <= v && v < b).count() as f64;
            best = best.max((c / n - (b - a)).abs());
        }
    }
    best
}

/// Midpoint-rule area of a region over its bounding box.
pub fn grid_measure(region: &ConvexRegion, step: f64) -> f64 {
    let ((x0, y0), (x1, y1)) = region.bounding_box();
    let nx = libm::ceil((x1 - x0) / step) as u64;
    let ny = libm::ceil((y1 - y0) / step) as u64;
    let (hx, hy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
    let mut hits = 0u64;
    for i in 0..nx {
        let a = x0 + (i as f64 + 0.5) * hx;
        for j in 0..ny {
            if region.contains(a, y0 + (j as f64 + 0.5) * hy) {
                hits += 1;
            }
        }
    }
    hits as f64 * hx * hy
}

/// `{h1 n^alpha + h2 r alpha n^(alpha-1)}` from 200-bit integer roots.
pub fn exact_phase(ctx: &AlphaContext, n: u64, h1: i64, h2: i64, r: u64) -> f64 {
    const S: u64 = 200;
    let e = ctx.exponent();
    let (p, q) = (e.numer(), e.denom());
    let root = |a: u32| (BigUint::from(n).pow(a) << (S * q as u64)).nth_root(q);
    let v = BigInt::from(root(p));
    // alpha n^(alpha-1) = p n^((p-q)/q) / q
    let s = BigInt::from(root(p - q)) * (p as u64 * r) / q;
    let t: BigInt = v * h1 + s * h2;
    let one = BigInt::from(1u8) << S;
    let mut f = t % &one;
    if f < BigInt::zero() {
        f += &one;
    }
    libm::ldexp((f >> (S - 60)).to_f64().unwrap(), -60)
}

/// `y` with `(y + r)^alpha - y^alpha = d`, by bisection in double precision.
pub fn gap_root_bisect(r: f64, d: f64, a: f64) -> f64 {
    // y^a ((1 + r/y)^a - 1), written out so large y does not cancel.
    let f = |y: f64| if y == 0.0 { libm::pow(r, a) - d } else { libm::pow(y, a) * libm::expm1(a * libm::log1p(r / y)) - d };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central differences of `r -> y(r)` with step `h`: `(y'', -y'''/y'')`.
///
/// `h` should scale with `r`; third differences lose `eps r^3 / h^3` to rounding.
pub fn inverse_derivatives_fd(r: f64, d: f64, a: f64, h: f64) -> (f64, f64) {
    let y = |s: f64| gap_root_bisect(s, d, a);
    let (m2, m1, z, p1, p2) = (y(r - 2.0 * h), y(r - h), y(r), y(r + h), y(r + 2.0 * h));
    let y2 = (p1 - 2.0 * z + m1) / (h * h);
    let y3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
    (y2, -y3 / y2)
}

/// `d -> N_alpha(d)` for `d <= d_max` from a fully materialised prefix of the sequence.
pub fn pair_table_brute(e: Exponent, d_max: u64) -> BTreeMap<u64, u64> {
    let mut seq: Vec<u64> = Vec::new();
    let mut n = 1u64;
    loop {
        seq.push(floor_pow_big(n, e).to_u64().expect("sequence fits u64"));
        let len = seq.len();
        // A gap of d_max + 2 forces f_1 > d_max + 1 from here on, so every later gap exceeds d_max.
        if len >= 2 && seq[len - 1] - seq[len - 2] > d_max + 1 {
            break;
        }
        n += 1;
    }
    let mut table: BTreeMap<u64, u64> = (1..=d_max).map(|d| (d, 0)).collect();
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let diff = seq[j] - seq[i];
            if diff > d_max {
                break;
            }
            *table.get_mut(&diff).unwrap() += 1;
        }
    }
    table
}

/// Triplets `floor(l^a) + floor(m^a) = floor(n^a)` with `l < x`, all indices `>= 1`.
pub fn triplet_brute(e: Exponent, x: u64) -> u64 {
    if x <= 1 {
        return 0;
    }
    let ls: Vec<u64> = (1..x).map(|l| floor_pow_big(l, e).to_u64().unwrap()).collect();
    let table = pair_table_brute(e, *ls.last().unwrap());
    ls.iter().map(|d| table[d]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_on_hand_cases() {
        let e = Exponent::new(3, 2).unwrap();
        assert_eq!(floor_pow_big(4, e), BigUint::from(8u8));
        assert_eq!(floor_pow_big(2, e), BigUint::from(2u8));
        assert_eq!(discrepancy_brute(&[0.0, 0.25, 0.5, 0.75]), 0.25);
        let t = pair_table_brute(e, 3);
        assert_eq!(t.into_iter().collect::<Vec<_>>(), [(1, 1), (2, 0), (3, 4)]);
        assert_eq!(triplet_brute(e, 3), 1);
        let c = AlphaContext::new(e);
        assert_eq!(exact_phase(&c, 4, 1, 0, 1), 0.0);
        // 1.5 * sqrt(4) = 3
        assert_eq!(exact_phase(&c, 4, 0, 1, 1), 0.0);
        assert!((exact_phase(&c, 2, 1, 0, 1) - (8f64.sqrt() - 2.0)).abs() < 1e-15);
        assert!((gap_root_bisect(1.0, 3.0, 1.5) - 1.0).abs() > 0.0);
        let y = gap_root_bisect(2.0, 10.0, 1.5);
        assert!(((y + 2.0).powf(1.5) - y.powf(1.5) - 10.0).abs() < 1e-9);
    }
}
