//! Exact solution counts `N_alpha(d)`, `N_{alpha,k}(d)`, triplets, and the
//! error terms `E_1`, `E_2`.
//!
//! A pair `(n, n + r)` has difference `g = floor((n+r)^alpha) - floor(n^alpha)`
//! with `f_r(n) - 1 < g < f_r(n) + 1`, so for fixed `r` every solution of
//! `g = d` lies in the index window where `d - 1 <= f_r(n) < d + 1`. The
//! engines locate that window with certified comparisons and then either
//! enumerate it or telescope the gap sum.

use alloc::collections::BTreeMap;

mod error_terms;
mod oracle;
mod pairs;
mod range;

pub use error_terms::{default_constants, default_constants_with_grid, error_term_e1, error_term_e2, DEFAULT_PROBE_DS};
pub use oracle::{oracle_pair_table, ORACLE_LENGTH_CAP};
pub use range::{fill_error_terms, EngineChoice, plan_range, sweep, RangePlan, RangeTally, RangeTask, SweepOptions, SweepReport};
pub use pairs::{count_for_r, count_record, kap_count, pair_count, r_limit, tail_count_e0, triplet_count, Strategy};


/// One row of results for a single difference `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub d: u64,
    pub pair_count: u64,
    /// `k -> N_{alpha,k}(d)`; always contains `k = 2`.
    pub kap_counts: BTreeMap<u32, u64>,
    /// `r -> number of solutions with step r`, when requested.
    pub r_histogram: Option<BTreeMap<u64, u64>>,
    pub e1: Option<u64>,
    pub e2: Option<u64>,
    /// Count for the record's largest `k`, divided by `d^(beta-1)`.
    pub normalized_ratio: f64,
}

impl CountRecord {
    pub fn kap(&self, k: u32) -> Option<u64> {
        self.kap_counts.get(&k).copied()
    }
}

/// Constants `C_1`, `C_2` of the error terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTermConfig {
    pub c1: f64,
    pub c2: f64,
    pub source: ConstantSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantSource {
    DefaultDerived,
    UserSupplied,
}

impl ErrorTermConfig {
    pub fn user(c1: f64, c2: f64) -> crate::Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
            return Err(crate::Error::Domain("error-term constants must be positive and finite"));
        }
        Ok(ErrorTermConfig { c1, c2, source: ConstantSource::UserSupplied })
    }
}
