use alloc::collections::{BTreeMap, VecDeque};

use crate::alpha::AlphaContext;
use crate::certreal::{boundary, floor_pow};
use crate::error::{Error, Result};

/// Longest sequence prefix the brute-force table will walk.
pub const ORACLE_LENGTH_CAP: u64 = 200_000_000;

/// Ground truth `d -> N_alpha(d)` for `1 <= d <= d_max` by walking the sequence.
///
/// Once `f_1(n) >= d_max + 1` every later consecutive gap exceeds `d_max`, so
/// pairs with a smaller first index are all that can contribute.
pub fn oracle_pair_table(ctx: &AlphaContext, d_max: u64, cap: u64) -> Result<BTreeMap<u64, u64>> {
    if d_max == 0 {
        return Err(Error::Domain("d_max must be at least 1"));
    }
    let stop = boundary(ctx, 1, d_max + 1)?;
    if stop > cap {
        return Err(Error::ResourceLimit { what: "oracle sequence length", needed: stop as u128, cap: cap as u128 });
    }
    let mut table = alloc::vec![0u64; d_max as usize + 1];
    let mut window: VecDeque<u128> = VecDeque::new();
    let mut next = 1u64;
    for _m in 1..stop {
        if window.is_empty() {
            window.push_back(floor_pow(next, ctx));
            next += 1;
        }
        let base = window[0];
        while *window.back().unwrap() - base <= d_max as u128 {
            window.push_back(floor_pow(next, ctx));
            next += 1;
        }
        for &a in window.iter().skip(1) {
            let diff = a - base;
            if diff > d_max as u128 {
                break;
            }
            table[diff as usize] += 1;
        }
        window.pop_front();
    }
    Ok((1..=d_max).map(|d| (d, table[d as usize])).collect())
}
