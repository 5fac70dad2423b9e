//! The gap function `f_r(x) = (x + r)^alpha - x^alpha`, its certified inverse,
//! and closed forms for the derivatives of `r -> f_r^{-1}(d)`.

use core::cmp::Ordering;

use crate::alpha::AlphaContext;
use crate::certreal::cert::{cmp_power_gap, power_gap_enclosure, Arg};
use crate::certreal::exact::Dyadic;
use crate::certreal::CertifiedValue;
use crate::error::{Error, Result};
use crate::math;

/// Enclosure of `f_r(x)`.
pub fn gap_eval(r: u64, x: f64, ctx: &AlphaContext) -> Result<CertifiedValue> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain("gap function needs a finite x >= 0"));
    }
    let bits = ctx.policy.initial_bits;
    let g = power_gap_enclosure(&Dyadic::from_f64(x, bits), &Dyadic::point_u64(r, bits), ctx)
        .ok_or(Error::Domain("gap function needs a finite x >= 0"))?;
    Ok(CertifiedValue::from_dyadic(&g))
}

/// `f_r'(y) = alpha ((y + r)^(alpha-1) - y^(alpha-1))`, stable for large `y`.
fn gap_slope(r: f64, y: f64, a: f64) -> f64 {
    if y == 0.0 {
        a * math::pow(r, a - 1.0)
    } else {
        a * math::shifted_power_gap(y, r, a - 1.0)
    }
}

/// Double-precision root of `f_r(y) = t`.
///
/// `f_r` is increasing and concave, so Newton started left of the root (at the
/// lower bound `(t / (r alpha))^beta - r`) climbs monotonically onto it.
pub fn solve_inverse_f64(r: f64, t: f64, alpha: f64) -> f64 {
    if t <= math::pow(r, alpha) {
        return 0.0;
    }
    let beta = 1.0 / (alpha - 1.0);
    let mut y = (math::pow(t / (r * alpha), beta) - r).max(0.0);
    for _ in 0..100 {
        let g = math::shifted_power_gap(y, r, alpha) - t;
        if g >= 0.0 {
            break;
        }
        let step = -g / gap_slope(r, y, alpha);
        let next = y + step;
        if !(next > y) {
            break;
        }
        y = next;
        if step <= y * 1e-17 {
            break;
        }
    }
    y
}

fn cmp_at(ctx: &AlphaContext, n: u64, r: u64, t: f64) -> Result<Ordering> {
    cmp_power_gap(ctx, Arg::Int(n), Arg::Int(r), t).map_err(|e| e.at(Some(n), Some(r), None))
}

/// Indices are `u64`; a solution past `2^62` is out of reach.
fn index_estimate(r: f64, t: f64, alpha: f64) -> Result<f64> {
    const CAP: f64 = 4_611_686_018_427_387_904.0;
    let y = solve_inverse_f64(r, t, alpha);
    if !(y < CAP) {
        return Err(Error::ResourceLimit { what: "gap inverse index", needed: if y.is_finite() { y as u128 } else { u128::MAX }, cap: CAP as u128 });
    }
    Ok(y)
}

/// `min { n >= 1 : f_r(n) >= t }`.
pub fn boundary(ctx: &AlphaContext, r: u64, t: u64) -> Result<u64> {
    let ge = |n: u64| -> Result<bool> { Ok(cmp_at(ctx, n, r, t as f64)? != Ordering::Less) };
    let y = index_estimate(r as f64, t as f64, ctx.alpha())?;
    let mut n = (math::ceil(y) as u64).max(1);
    if ge(n)? {
        while n > 1 && ge(n - 1)? {
            n -= 1;
        }
    } else {
        n += 1;
        while !ge(n)? {
            n += 1;
        }
    }
    Ok(n)
}

/// `floor(f_r^{-1}(t))` for `t >= r^alpha`, plus whether `f_r` hits `t` exactly there.
pub fn floor_inverse(ctx: &AlphaContext, r: u64, t: f64) -> Result<(u64, bool)> {
    let y = index_estimate(r as f64, t, ctx.alpha())?;
    let mut m = math::floor(y) as u64;
    let mut o = cmp_at(ctx, m, r, t)?;
    while o == Ordering::Greater {
        m -= 1;
        o = cmp_at(ctx, m, r, t)?;
    }
    loop {
        let up = cmp_at(ctx, m + 1, r, t)?;
        if up == Ordering::Greater {
            break;
        }
        m += 1;
        o = up;
    }
    Ok((m, o == Ordering::Equal))
}

/// Certified inverse of the gap function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapInverse {
    pub value: CertifiedValue,
    pub floor: u64,
    /// `{y}`, enclosed; its integer part is certified by exact comparisons.
    pub frac: CertifiedValue,
}

/// Fractional parts closer than this to 0 or 1 trigger further refinement.
const FRAC_GUARD: f64 = 1e-9;

/// `y >= 0` with `f_r(y) = t`, bracketed to relative width `policy.inverse_rel_tol`.
pub fn gap_inverse(r: u64, t: f64, ctx: &AlphaContext) -> Result<GapInverse> {
    if r == 0 || !t.is_finite() {
        return Err(Error::Domain("gap inverse needs r >= 1 and finite t"));
    }
    match cmp_at(ctx, 0, r, t)? {
        Ordering::Greater => return Err(Error::Domain("gap inverse needs t >= r^alpha")),
        Ordering::Equal => {
            let z = CertifiedValue::exact(0.0);
            return Ok(GapInverse { value: z, floor: 0, frac: z });
        }
        Ordering::Less => {}
    }
    let (m, exact) = floor_inverse(ctx, r, t)?;
    let mf = m as f64;
    if exact {
        return Ok(GapInverse { value: CertifiedValue::exact(mf), floor: m, frac: CertifiedValue::exact(0.0) });
    }
    let at = |x: f64| cmp_power_gap(ctx, Arg::Real(x), Arg::Int(r), t).map_err(|e| e.at(None, Some(r), None));
    let tol = ctx.policy.inverse_rel_tol;
    let (mut lo, mut hi) = (mf, mf + 1.0);
    let y0 = solve_inverse_f64(r as f64, t, ctx.alpha());
    let w = (y0 * tol * 0.25).max(f64::MIN_POSITIVE);
    if y0 - w > lo && y0 - w < hi && at(y0 - w)? == Ordering::Less {
        lo = y0 - w;
    }
    if y0 + w < hi && y0 + w > lo && at(y0 + w)? == Ordering::Greater {
        hi = y0 + w;
    }
    loop {
        let (flo, fhi) = (lo - mf, hi - mf);
        let mut target = tol * lo.max(1e-3);
        let near = flo.min(1.0 - fhi);
        if near < FRAC_GUARD {
            target = target.min(near * 1e-3);
        }
        if hi - lo <= target {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if !(mid > lo && mid < hi) {
            break;
        }
        match at(mid)? {
            Ordering::Less => lo = mid,
            _ => hi = mid,
        }
    }
    let bits = ctx.policy.initial_bits;
    Ok(GapInverse {
        value: CertifiedValue::new(lo, hi, bits),
        floor: m,
        frac: CertifiedValue::new(lo - mf, hi - mf, bits),
    })
}

/// Closed form of `d^2/dr^2 f_r^{-1}(d)` at `y = f_r^{-1}(d)`.
pub fn second_derivative_closed(r: f64, y: f64, d: f64, a: f64) -> f64 {
    let diff = math::shifted_power_gap(y, r, a - 1.0);
    d * (a - 1.0) / (diff * diff * diff * math::pow(y, 2.0 - a) * math::pow(y + r, 2.0 - a))
}

/// Closed form of `-y'''/y''` at `y = f_r^{-1}(d)`.
pub fn third_ratio_closed(r: f64, y: f64, a: f64) -> f64 {
    let diff = math::shifted_power_gap(y, r, a - 1.0);
    let cross = (2.0 * a - 1.0) * r * math::pow(y, a - 1.0) * math::pow(y + r, a - 1.0);
    let num = cross - (2.0 - a) * math::shifted_power_gap(y, r, 2.0 * a - 1.0);
    num / (diff * diff * y * (y + r))
}

fn check_support(ctx: &AlphaContext, r: u64, d: u64, scale: u64) -> Result<()> {
    if r == 0 || d == 0 {
        return Err(Error::Domain("r and d must be positive"));
    }
    let rs = r.checked_mul(scale).ok_or(Error::Domain("r too large"))?;
    if cmp_at(ctx, 0, rs, d as f64)? == Ordering::Greater {
        return Err(Error::Domain("r exceeds the admissible range for d"));
    }
    Ok(())
}

fn interior_root(ctx: &AlphaContext, r: u64, d: u64) -> Result<f64> {
    let y = gap_inverse(r, d as f64, ctx)?.value.mid();
    if y == 0.0 {
        return Err(Error::Domain("derivative is singular where r^alpha = d"));
    }
    Ok(y)
}

/// `y''` for `y(r) = f_r^{-1}(d)`; requires `r <= d^(1/alpha)`.
pub fn inverse_second_derivative(r: u64, d: u64, ctx: &AlphaContext) -> Result<f64> {
    check_support(ctx, r, d, 1)?;
    let y = interior_root(ctx, r, d)?;
    Ok(second_derivative_closed(r as f64, y, d as f64, ctx.alpha()))
}

/// `-y'''/y''` for `y(r) = f_r^{-1}(d)`; requires `r <= d^(1/alpha) / 2`.
pub fn inverse_third_derivative_ratio(r: u64, d: u64, ctx: &AlphaContext) -> Result<f64> {
    check_support(ctx, r, d, 2)?;
    let y = interior_root(ctx, r, d)?;
    Ok(third_ratio_closed(r as f64, y, ctx.alpha()))
}

/// One evaluation point for the derivative lemmas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapProbe {
    pub r: u64,
    pub d: u64,
    pub y: CertifiedValue,
    pub y2: f64,
    /// Only defined when `r <= d^(1/alpha) / 2`.
    pub y3_ratio: Option<f64>,
}

pub fn gap_probe(r: u64, d: u64, ctx: &AlphaContext) -> Result<GapProbe> {
    let y2 = inverse_second_derivative(r, d, ctx)?;
    let y = gap_inverse(r, d as f64, ctx)?.value;
    let y3_ratio = match inverse_third_derivative_ratio(r, d, ctx) {
        Ok(v) => Some(v),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(GapProbe { r, d, y, y2, y3_ratio })
}
