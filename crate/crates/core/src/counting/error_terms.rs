use core::cmp::Ordering;

use crate::alpha::AlphaContext;
use crate::certreal::cert::{cmp_power_gap, Arg, PowerMonomial};
use crate::certreal::{floor_inverse, solve_inverse_f64};
use crate::counting::{ConstantSource, ErrorTermConfig};
use crate::error::{Error, Result};
use crate::math;

/// Differences at which `default_constants` probes `F_r(d - 1) r^beta / d^(beta-1)`.
pub const DEFAULT_PROBE_DS: [u64; 4] = [100, 1_000, 10_000, 100_000];

/// `C_1` from an empirical supremum over the probe grid (with a factor 2 of
/// headroom); `C_2 = 2 (4/alpha)^beta`.
pub fn default_constants(ctx: &AlphaContext) -> Result<ErrorTermConfig> {
    default_constants_with_grid(ctx, &DEFAULT_PROBE_DS)
}

/// As [`default_constants`], probing `r = 1, 2, 4, ... <= (d-1)^(1/alpha) / 4` for each `d`.
pub fn default_constants_with_grid(ctx: &AlphaContext, ds: &[u64]) -> Result<ErrorTermConfig> {
    let (a, b) = (ctx.alpha(), ctx.beta());
    let mut sup = 0.0f64;
    let mut probes = 0;
    for &d in ds {
        if d < 2 {
            continue;
        }
        let x = (d - 1) as f64;
        let r_max = math::pow(x, 1.0 / a) / 4.0;
        let mut r = 1.0;
        while r <= r_max {
            let spread = solve_inverse_f64(r, x + 2.0, a) - solve_inverse_f64(r, x, a);
            sup = sup.max(spread * math::pow(r, b) / ctx.growth(d as f64));
            probes += 1;
            r *= 2.0;
        }
    }
    if probes == 0 {
        return Err(Error::Domain("probe grid for the error-term constants is empty"));
    }
    Ok(ErrorTermConfig { c1: 2.0 * sup, c2: 2.0 * math::pow(4.0 / a, b), source: ConstantSource::DefaultDerived })
}

/// Decide `{y} + c > 1` where `floor(y) = m`, `y` exact integer iff `integral`,
/// and `below(u)` certifies `u < y` for `u = m + 1 - c`.
fn frac_exceeds(
    ctx: &AlphaContext,
    c: &PowerMonomial,
    integral: bool,
    below: impl FnOnce() -> Result<bool>,
) -> Result<bool> {
    match c.cmp_f64(1.0, ctx)? {
        Ordering::Greater => Ok(true),
        Ordering::Equal => Ok(!integral),
        Ordering::Less => below(),
    }
}

/// `E_1(d) = #{ r <= d^(1/alpha)/4 : {f_r^{-1}(d)} + C_1 d^(beta-1) / r^beta > 1 }`.
pub fn error_term_e1(ctx: &AlphaContext, d: u64, cfg: &ErrorTermConfig) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("d must be at least 1"));
    }
    let (bn, bd) = ctx.beta_ratio();
    let t = d as f64;
    let mut count = 0;
    let mut r = 1u64;
    // r <= d^(1/alpha)/4  <=>  (4r)^alpha <= d
    while cmp_power_gap(ctx, Arg::Int(0), Arg::Int(4 * r), t)? != Ordering::Greater {
        let c = PowerMonomial::new(cfg.c1)
            .times_pow(d, bn as i64 - bd as i64, bd)
            .times_pow(r, -(bn as i64), bd);
        let (m, integral) = floor_inverse(ctx, r, t).map_err(|e| e.at(None, Some(r), Some(d)))?;
        // y > m + 1 - c  <=>  f_r(m + 1 - c) < d
        let hit = frac_exceeds(ctx, &c, integral, || {
            Ok(cmp_power_gap(ctx, Arg::IntMinus(m + 1, &c), Arg::Int(r), t)? == Ordering::Less)
        })
        .map_err(|e| e.at(Some(m), Some(r), Some(d)))?;
        count += hit as u64;
        r += 1;
    }
    Ok(count)
}

/// `E_2(d) = #{ n < C_2 d^(1/alpha) : {(n^alpha + d)^(1/alpha)} + 2 d^(1/alpha - 1) > 1 }`.
pub fn error_term_e2(ctx: &AlphaContext, d: u64, cfg: &ErrorTermConfig) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("d must be at least 1"));
    }
    let e = ctx.exponent();
    let (p, q) = (e.numer() as i64, e.denom());
    let t = d as f64;
    let limit = PowerMonomial::new(cfg.c2).times_pow(d, q as i64, p as u32);
    let c = PowerMonomial::new(2.0).times_pow(d, q as i64 - p, p as u32);
    let mut count = 0;
    let mut n = 1u64;
    while limit.cmp_f64(n as f64, ctx)? == Ordering::Greater {
        // z = (n^alpha + d)^(1/alpha) = n + s + frac with s = max { s : f_s(n) <= d }.
        let guess = math::pow(math::pow(n as f64, ctx.alpha()) + t, 1.0 / ctx.alpha()) - n as f64;
        let mut s = math::floor(guess.max(0.0)) as u64;
        let at = |s: u64| cmp_power_gap(ctx, Arg::Int(n), Arg::Int(s), t).map_err(|e| e.at(Some(n), None, Some(d)));
        while s > 0 && at(s)? == Ordering::Greater {
            s -= 1;
        }
        while at(s + 1)? != Ordering::Greater {
            s += 1;
        }
        let integral = at(s)? == Ordering::Equal;
        // z > n + s + 1 - c  <=>  (n + s + 1 - c)^alpha - n^alpha < d
        let hit = frac_exceeds(ctx, &c, integral, || {
            Ok(cmp_power_gap(ctx, Arg::Int(n), Arg::IntMinus(s + 1, &c), t)? == Ordering::Less)
        })
        .map_err(|e| e.at(Some(n), None, Some(d)))?;
        count += hit as u64;
        n += 1;
    }
    Ok(count)
}
