//! Counting many differences at once.
//!
//! For a contiguous range of differences `[d_lo, d_hi]` it is far cheaper to
//! stream, for each step `r`, the whole index window in which `f_r` crosses
//! the range and histogram the gaps, than to run the per-`d` engine for every
//! `d`. The plan below picks whichever is cheaper and splits the work into
//! independent tasks whose tallies add up, so callers can run them in any
//! order or in parallel and still get identical results.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::alpha::{AlphaContext, Exponent};
use crate::certreal::{asymptotic_constant, boundary, solve_inverse_f64};
use crate::counting::pairs::{count_record, enumerate_window, r_limit, Strategy};
use crate::counting::{error_term_e1, error_term_e2, CountRecord, ErrorTermConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    /// Compute `E_1`, `E_2` for every record with these constants.
    pub errors: Option<ErrorTermConfig>,
    /// Keep per-`r` histograms (memory grows with the number of steps).
    pub histograms: bool,
    /// Refuse plans whose estimated number of floor evaluations exceeds this.
    pub max_floor_evals: Option<u128>,
    /// Index-window length per task.
    pub chunk: u64,
    pub engine: EngineChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    /// Whichever has the smaller estimated number of floor evaluations.
    #[default]
    Auto,
    Stream,
    PerDifference,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { errors: None, histograms: false, max_floor_evals: None, chunk: 1 << 20, engine: EngineChoice::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeTask {
    /// Stream `n in [start, end)` for step `r`.
    Window { r: u64, start: u64, end: u64 },
    /// Run the per-difference engine for one `d`.
    Single { d: u64 },
}

#[derive(Debug, Clone)]
pub struct RangePlan {
    pub k: u32,
    pub d_lo: u64,
    pub d_hi: u64,
    pub stride: u64,
    pub tasks: Vec<RangeTask>,
    pub estimated_floor_evals: u128,
    histograms: bool,
    slots: usize,
}

/// Partial counts; tallies from disjoint task sets add.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeTally {
    slots: usize,
    /// `counts[(k' - 2) * slots + slot]`
    counts: Vec<u64>,
    hist: Option<BTreeMap<(u64, u64), u64>>,
}

impl RangeTally {
    pub fn merge(mut self, other: RangeTally) -> RangeTally {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        if let (Some(h), Some(o)) = (self.hist.as_mut(), other.hist) {
            for (key, v) in o {
                *h.entry(key).or_default() += v;
            }
        }
        self
    }
}

fn window_len(ctx: &AlphaContext, r: u64, t_lo: u64, t_hi: u64) -> f64 {
    let a = ctx.alpha();
    solve_inverse_f64(r as f64, t_hi as f64, a) - solve_inverse_f64(r as f64, t_lo as f64, a)
}

/// Decide between the streaming and per-difference engines and build tasks.
pub fn plan_range(ctx: &AlphaContext, k: u32, d_lo: u64, d_hi: u64, stride: u64, opts: &SweepOptions) -> Result<RangePlan> {
    if k < 2 || d_lo == 0 || stride == 0 {
        return Err(Error::Domain("need k >= 2, d_lo >= 1 and stride >= 1"));
    }
    let slots = if d_hi < d_lo { 0 } else { ((d_hi - d_lo) / stride + 1) as usize };
    let mut plan = RangePlan { k, d_lo, d_hi, stride, tasks: Vec::new(), estimated_floor_evals: 0, histograms: opts.histograms, slots };
    if slots == 0 {
        return Ok(plan);
    }
    let span = (k - 1) as f64;
    let r_max = r_limit(ctx, d_hi);
    let chunk = opts.chunk.max(1) as f64;
    let mut stream_cost = 0.0;
    for r in 1..=r_max {
        let len = window_len(ctx, r, d_lo.saturating_sub(1), d_hi + 1).max(1.0);
        stream_cost += len + crate::math::ceil(len / chunk) * span * r as f64;
    }
    let d_mid = d_lo + (d_hi - d_lo) / 2;
    let mut single_cost = 0.0;
    for r in 1..=r_limit(ctx, d_mid) {
        let len = window_len(ctx, r, d_mid - 1, d_mid + 1).max(1.0);
        let enumerate = len + span * r as f64;
        single_cost += if k == 2 { enumerate.min(3.0 * r as f64) } else { enumerate };
    }
    single_cost *= slots as f64;
    let stream = match opts.engine {
        EngineChoice::Auto => stream_cost <= single_cost,
        EngineChoice::Stream => true,
        EngineChoice::PerDifference => false,
    };
    if stream {
        for r in 1..=r_max {
            let start = if d_lo == 1 { 1 } else { boundary(ctx, r, d_lo - 1)? };
            let end = boundary(ctx, r, d_hi + 1)?;
            let mut s = start;
            while s < end {
                let e = end.min(s.saturating_add(opts.chunk.max(1)));
                plan.tasks.push(RangeTask::Window { r, start: s, end: e });
                s = e;
            }
        }
        plan.estimated_floor_evals = stream_cost as u128;
    } else {
        plan.tasks = (0..slots as u64).map(|i| RangeTask::Single { d: d_lo + i * stride }).collect();
        plan.estimated_floor_evals = single_cost as u128;
    }
    if let Some(cap) = opts.max_floor_evals {
        if plan.estimated_floor_evals > cap {
            return Err(Error::ResourceLimit { what: "floor evaluations", needed: plan.estimated_floor_evals, cap });
        }
    }
    Ok(plan)
}

impl RangePlan {
    pub fn empty_tally(&self) -> RangeTally {
        RangeTally {
            slots: self.slots,
            counts: vec![0; (self.k as usize - 1) * self.slots],
            hist: self.histograms.then(BTreeMap::new),
        }
    }

    fn slot(&self, g: u128) -> Option<usize> {
        if g < self.d_lo as u128 || g > self.d_hi as u128 {
            return None;
        }
        let off = (g - self.d_lo as u128) as u64;
        (off % self.stride == 0).then_some((off / self.stride) as usize)
    }

    pub fn run(&self, ctx: &AlphaContext, task: &RangeTask, tally: &mut RangeTally) -> Result<()> {
        match *task {
            RangeTask::Window { r, start, end } => {
                let slots = self.slots;
                enumerate_window(ctx, r, self.k, start, end, |g, run| {
                    if let Some(i) = self.slot(g) {
                        for j in 0..run {
                            tally.counts[j * slots + i] += 1;
                        }
                        if let Some(h) = tally.hist.as_mut() {
                            *h.entry((g as u64, r)).or_default() += 1;
                        }
                    }
                });
            }
            RangeTask::Single { d } => {
                let rec = count_record(ctx, d, self.k, Strategy::Auto)?;
                let i = self.slot(d as u128).expect("planned difference");
                for (j, (_, v)) in rec.kap_counts.iter().enumerate() {
                    tally.counts[j * self.slots + i] += v;
                }
                if let (Some(h), Some(rh)) = (tally.hist.as_mut(), rec.r_histogram) {
                    for (r, v) in rh {
                        *h.entry((d, r)).or_default() += v;
                    }
                }
            }
        }
        Ok(())
    }

    /// Records in increasing `d`; error terms are left empty.
    pub fn records(&self, ctx: &AlphaContext, tally: &RangeTally) -> Vec<CountRecord> {
        (0..self.slots)
            .map(|i| {
                let d = self.d_lo + i as u64 * self.stride;
                let kap_counts: BTreeMap<u32, u64> =
                    (0..self.k as usize - 1).map(|j| (j as u32 + 2, tally.counts[j * self.slots + i])).collect();
                let top = kap_counts[&self.k];
                let r_histogram = tally.hist.as_ref().map(|h| {
                    h.range((d, 0)..=(d, u64::MAX)).map(|(&(_, r), &v)| (r, v)).collect::<BTreeMap<u64, u64>>()
                });
                CountRecord {
                    d,
                    pair_count: kap_counts[&2],
                    kap_counts,
                    r_histogram,
                    e1: None,
                    e2: None,
                    normalized_ratio: top as f64 / ctx.growth(d as f64),
                }
            })
            .collect()
    }
}

/// Fill in `E_1`, `E_2` for one record.
pub fn fill_error_terms(ctx: &AlphaContext, rec: &mut CountRecord, cfg: &ErrorTermConfig) -> Result<()> {
    rec.e1 = Some(error_term_e1(ctx, rec.d, cfg)?);
    rec.e2 = Some(error_term_e2(ctx, rec.d, cfg)?);
    Ok(())
}

/// Records for `d = d_lo, d_lo + stride, ... <= d_hi` and the windowed convergence statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub alpha: Exponent,
    pub k: u32,
    pub d_lo: u64,
    pub d_hi: u64,
    pub stride: u64,
    pub records: Vec<CountRecord>,
    /// Mean of `normalized_ratio`; `None` for an empty range.
    pub window_mean_ratio: Option<f64>,
    pub target_constant: f64,
    pub relative_gap: Option<f64>,
}

impl SweepReport {
    pub fn from_records(ctx: &AlphaContext, k: u32, d_lo: u64, d_hi: u64, stride: u64, records: Vec<CountRecord>) -> Result<Self> {
        let target_constant = asymptotic_constant(ctx, k)?;
        let window_mean_ratio = (!records.is_empty())
            .then(|| records.iter().map(|r| r.normalized_ratio).sum::<f64>() / records.len() as f64);
        let relative_gap = window_mean_ratio.map(|m| (m - target_constant).abs() / target_constant);
        Ok(SweepReport { alpha: ctx.exponent(), k, d_lo, d_hi, stride, records, window_mean_ratio, target_constant, relative_gap })
    }
}

/// Single-threaded sweep.
pub fn sweep(ctx: &AlphaContext, k: u32, d_lo: u64, d_hi: u64, stride: u64, opts: &SweepOptions) -> Result<SweepReport> {
    let plan = plan_range(ctx, k, d_lo, d_hi, stride, opts)?;
    let mut tally = plan.empty_tally();
    for t in &plan.tasks {
        plan.run(ctx, t, &mut tally)?;
    }
    let mut records = plan.records(ctx, &tally);
    if let Some(cfg) = &opts.errors {
        for rec in &mut records {
            fill_error_terms(ctx, rec, cfg)?;
        }
    }
    SweepReport::from_records(ctx, k, d_lo, d_hi, stride, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> AlphaContext {
        AlphaContext::parse(s).unwrap()
    }

    #[test]
    fn streaming_matches_per_difference() {
        for a in ["1.5", "1.7", "4/3"] {
            let c = ctx(a);
            let opts = SweepOptions { histograms: true, chunk: 777, engine: EngineChoice::Stream, ..Default::default() };
            let plan = plan_range(&c, 4, 1, 400, 1, &opts).unwrap();
            assert!(matches!(plan.tasks[0], RangeTask::Window { .. }));
            let mut tally = plan.empty_tally();
            for t in &plan.tasks {
                plan.run(&c, t, &mut tally).unwrap();
            }
            for rec in plan.records(&c, &tally) {
                let want = count_record(&c, rec.d, 4, Strategy::Auto).unwrap();
                assert_eq!(rec.kap_counts, want.kap_counts, "alpha={a} d={}", rec.d);
                assert_eq!(rec.r_histogram, want.r_histogram, "alpha={a} d={}", rec.d);
            }
        }
    }

    #[test]
    fn task_order_does_not_matter() {
        let c = ctx("1.5");
        let opts = SweepOptions { chunk: 50, ..Default::default() };
        let plan = plan_range(&c, 3, 900, 1100, 1, &opts).unwrap();
        let fwd = plan.tasks.iter().fold(plan.empty_tally(), |mut t, task| {
            plan.run(&c, task, &mut t).unwrap();
            t
        });
        let halves: Vec<RangeTally> = plan
            .tasks
            .chunks(7)
            .rev()
            .map(|ch| {
                let mut t = plan.empty_tally();
                for task in ch {
                    plan.run(&c, task, &mut t).unwrap();
                }
                t
            })
            .collect();
        let merged = halves.into_iter().fold(plan.empty_tally(), RangeTally::merge);
        assert_eq!(fwd, merged);
    }

    #[test]
    fn strided_and_empty_sweeps() {
        let c = ctx("1.5");
        let rep = sweep(&c, 2, 10, 5, 1, &SweepOptions::default()).unwrap();
        assert!(rep.records.is_empty() && rep.relative_gap.is_none() && rep.window_mean_ratio.is_none());
        let rep = sweep(&c, 2, 100, 150, 1000, &SweepOptions::default()).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.records[0].pair_count, count_record(&c, 100, 2, Strategy::Auto).unwrap().pair_count);
        let rep = sweep(&c, 3, 1000, 5000, 997, &SweepOptions::default()).unwrap();
        let ds: Vec<u64> = rep.records.iter().map(|r| r.d).collect();
        assert_eq!(ds, [1000, 1997, 2994, 3991, 4988]);
        for r in &rep.records {
            assert_eq!(r.kap_counts, count_record(&c, r.d, 3, Strategy::Auto).unwrap().kap_counts);
        }
    }

    #[test]
    fn caps_and_error_terms() {
        let c = ctx("1.5");
        let opts = SweepOptions { max_floor_evals: Some(10), ..Default::default() };
        assert!(matches!(sweep(&c, 2, 1000, 2000, 1, &opts), Err(Error::ResourceLimit { .. })));
        let cfg = crate::counting::default_constants(&c).unwrap();
        let opts = SweepOptions { errors: Some(cfg), ..Default::default() };
        let rep = sweep(&c, 2, 500, 502, 1, &opts).unwrap();
        for r in &rep.records {
            assert_eq!(r.e1, Some(error_term_e1(&c, r.d, &cfg).unwrap()));
            assert!(r.e2.is_some());
        }
    }
}
