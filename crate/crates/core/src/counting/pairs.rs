use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::alpha::AlphaContext;
use crate::certreal::{boundary, floor_pow, FloorCursor};
use crate::counting::CountRecord;
use crate::error::{Error, Result};

/// How the per-`r` count is obtained once the index window is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Telescoping for `k = 2` when cheaper, enumeration otherwise.
    #[default]
    Auto,
    /// Compute every gap in the window.
    Enumerate,
    /// `k = 2` only: the gap sum over an index range telescopes to two
    /// blocks of `r` sequence values.
    Telescope,
}

/// Largest step that can produce difference `d`: `max { r : floor(r^alpha) <= d }`.
pub fn r_limit(ctx: &AlphaContext, d: u64) -> u64 {
    let mut r = crate::math::pow(d as f64 + 1.0, 1.0 / ctx.alpha()) as u64 + 1;
    while r > 0 && floor_pow(r, ctx) > d as u128 {
        r -= 1;
    }
    while floor_pow(r + 1, ctx) <= d as u128 {
        r += 1;
    }
    r
}

/// `sum_{i < r} floor((x + i)^alpha)`.
fn block_sum(ctx: &AlphaContext, x: u64, r: u64) -> u128 {
    FloorCursor::new(ctx, x, x + r).take(r as usize).sum()
}

/// Windows `X_{d-1} <= X_d <= X_{d+1}` with `X_t = min { n >= 1 : f_r(n) >= t }`.
fn windows(ctx: &AlphaContext, r: u64, d: u64) -> Result<[u64; 3]> {
    let lo = if d == 1 { 1 } else { boundary(ctx, r, d - 1)? };
    Ok([lo, boundary(ctx, r, d)?, boundary(ctx, r, d + 1)?])
}

/// Counts of `k'`-progressions with step `r` and difference `d`, for `k' = 2..=k`.
///
/// Entry `j` is the number of `n >= 1` with
/// `floor((n + i r)^alpha) - floor((n + (i-1) r)^alpha) = d` for `i = 1..=j+1`.
pub fn count_for_r(ctx: &AlphaContext, r: u64, d: u64, k: u32, strategy: Strategy) -> Result<Vec<u64>> {
    if k < 2 || r == 0 || d == 0 {
        return Err(Error::Domain("need k >= 2, r >= 1 and d >= 1"));
    }
    let [x0, x1, x2] = windows(ctx, r, d).map_err(|e| e.at(None, Some(r), Some(d)))?;
    let telescope = match strategy {
        Strategy::Telescope if k == 2 => true,
        Strategy::Telescope => return Err(Error::Domain("telescoping only counts pairs")),
        Strategy::Enumerate => false,
        Strategy::Auto => k == 2 && 3 * r < (x2 - x0) + r,
    };
    if telescope {
        // In [x0, x1) gaps are d-1 or d; in [x1, x2) they are d or d+1.
        let (s0, s1, s2) = (block_sum(ctx, x0, r), block_sum(ctx, x1, r), block_sum(ctx, x2, r));
        let a = (s1 - s0) - (d as u128 - 1) * (x1 - x0) as u128;
        let b = (d as u128 + 1) * (x2 - x1) as u128 - (s2 - s1);
        return Ok(vec![(a + b) as u64]);
    }
    let mut out = vec![0u64; k as usize - 1];
    enumerate_window(ctx, r, k, x0, x2, |g, run| {
        if g == d as u128 {
            for c in out.iter_mut().take(run) {
                *c += 1;
            }
        }
    });
    Ok(out)
}

/// Stream `n in [start, end)` and report `(g_n, run)` where `run` is the number
/// of consecutive equal gaps `g_n = g_{n+r} = ...`, capped at `k - 1`.
pub(crate) fn enumerate_window(ctx: &AlphaContext, r: u64, k: u32, start: u64, end: u64, mut visit: impl FnMut(u128, usize)) {
    if end <= start {
        return;
    }
    let span = (k as u64 - 1) * r;
    let w = span as usize + 1;
    let mut cursor = FloorCursor::new(ctx, start, end + span + 1);
    let mut ring: Vec<u128> = cursor.by_ref().take(w).collect();
    let r = r as usize;
    let mut head = 0usize;
    let at = |head: usize, off: usize| {
        let i = head + off;
        if i >= w {
            i - w
        } else {
            i
        }
    };
    for _ in start..end {
        let a0 = ring[head];
        let g = ring[at(head, r)] - a0;
        let mut run = 1;
        while run < k as usize - 1 {
            let lo = ring[at(head, run * r)];
            if ring[at(head, (run + 1) * r)] - lo != g {
                break;
            }
            run += 1;
        }
        visit(g, run);
        ring[head] = cursor.next().unwrap();
        head = at(head, 1);
    }
}

/// Full record for difference `d`: counts for `k' = 2..=k` and the per-`r` histogram of pairs.
pub fn count_record(ctx: &AlphaContext, d: u64, k: u32, strategy: Strategy) -> Result<CountRecord> {
    if d == 0 {
        return Err(Error::Domain("d must be at least 1"));
    }
    if k < 2 {
        return Err(Error::Domain("progression length must be at least 2"));
    }
    let mut totals = vec![0u64; k as usize - 1];
    let mut hist = BTreeMap::new();
    for r in 1..=r_limit(ctx, d) {
        let c = count_for_r(ctx, r, d, k, strategy)?;
        for (t, v) in totals.iter_mut().zip(&c) {
            *t += v;
        }
        if c[0] > 0 {
            hist.insert(r, c[0]);
        }
    }
    let kap_counts: BTreeMap<u32, u64> = totals.iter().enumerate().map(|(i, &v)| (i as u32 + 2, v)).collect();
    Ok(CountRecord {
        d,
        pair_count: totals[0],
        normalized_ratio: totals[k as usize - 2] as f64 / ctx.growth(d as f64),
        kap_counts,
        r_histogram: Some(hist),
        e1: None,
        e2: None,
    })
}

/// `N_alpha(d)` with its per-step histogram.
pub fn pair_count(ctx: &AlphaContext, d: u64) -> Result<CountRecord> {
    count_record(ctx, d, 2, Strategy::Auto)
}

/// `N_{alpha,k}(d)`: progressions `n, n + r, ..., n + (k-1) r` whose images
/// advance by exactly `d` at every step.
pub fn kap_count(ctx: &AlphaContext, k: u32, d: u64) -> Result<u64> {
    if k < 2 || d == 0 {
        return Err(Error::Domain("need k >= 2 and d >= 1"));
    }
    let mut total = 0;
    for r in 1..=r_limit(ctx, d) {
        total += count_for_r(ctx, r, d, k, Strategy::Auto)?[k as usize - 2];
    }
    Ok(total)
}

/// `sum_{1 <= l < x} N_alpha(floor(l^alpha))`: triplets with `floor(l^a) + floor(m^a) = floor(n^a)`.
pub fn triplet_count(ctx: &AlphaContext, x: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::Domain("x must be at least 1"));
    }
    let mut total = 0;
    for l in 1..x {
        let d = floor_pow(l, ctx);
        let d = u64::try_from(d).map_err(|_| Error::Domain("floor(l^alpha) exceeds 64 bits"))?;
        total += pair_count(ctx, d)?.pair_count;
    }
    Ok(total)
}

/// Solutions with step `r > big_r`.
pub fn tail_count_e0(ctx: &AlphaContext, d: u64, big_r: u64) -> Result<u64> {
    let rec = pair_count(ctx, d)?;
    Ok(rec.r_histogram.unwrap_or_default().range(big_r + 1..).map(|(_, v)| v).sum())
}
