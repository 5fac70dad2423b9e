//! Parallel drivers. Work is split into tasks whose results are combined in a
//! fixed order, so reports do not depend on the worker count.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pslab_core::certreal::{asymptotic_constant, floor_pow, zeta};
use pslab_core::counting::{
    count_record, default_constants, error_term_e1, error_term_e2, fill_error_terms, pair_count, plan_range, CountRecord,
    ErrorTermConfig, RangeTally, Strategy, SweepOptions, SweepReport,
};
use pslab_core::equidist::{
    discrepancy_report, short_interval_count, weyl_sum, ConvexRegion, DiscrepancyReport, Membership, PhaseStream, Rect,
    RegionSign, UnitSquare, WindowSpec,
};
use pslab_core::{AlphaContext, Error, RegimeFlags};

use crate::config::{CliError, DRange};

/// Set by the SIGINT handler; drivers stop at the next task boundary.
pub static INTERRUPTED: AtomicBool = AtomicBool::new(false);

pub fn install_interrupt_handler() -> Result<(), CliError> {
    // SAFETY: the action only stores to an atomic, which is async-signal-safe.
    unsafe { signal_hook_registry::register(libc::SIGINT, || INTERRUPTED.store(true, Ordering::SeqCst)) }
        .map(|_| ())
        .map_err(|e| CliError::failed(format!("cannot install SIGINT handler: {e}")))
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::failed(format!("cannot start worker pool: {e}")))
}

/// Constants for `E_1`, `E_2`: user overrides, or the derived defaults.
pub fn error_constants(ctx: &AlphaContext, c1: Option<f64>, c2: Option<f64>) -> Result<ErrorTermConfig, CliError> {
    match (c1, c2) {
        (None, None) => Ok(default_constants(ctx)?),
        (Some(a), Some(b)) => Ok(ErrorTermConfig::user(a, b)?),
        _ => Err(CliError::config("--c1 and --c2 must be given together")),
    }
}

/// `N_alpha(d)`, `N_{alpha,k}(d)`, optionally `E_1`, `E_2` and the tail `E_0(d, R)`.
pub fn count(ctx: &AlphaContext, d: u64, k: u32, errors: Option<&ErrorTermConfig>, tail_r: Option<u64>) -> Result<(CountRecord, Option<u64>), CliError> {
    let mut rec = count_record(ctx, d, k, Strategy::Auto)?;
    if let Some(cfg) = errors {
        fill_error_terms(ctx, &mut rec, cfg)?;
    }
    let tail = tail_r.map(|big_r| rec.r_histogram.as_ref().map_or(0, |h| h.range(big_r + 1..).map(|(_, v)| v).sum()));
    Ok((rec, tail))
}

/// Differences per block; a block is the unit of output and of interruption.
pub const BLOCK_SLOTS: u64 = 1000;

enum Stop {
    Core(Error),
    Interrupted,
}

/// Sweep `range` block by block, handing each finished block to `emit`.
/// Returns the full report and whether the run was cut short.
pub fn sweep(
    ctx: &AlphaContext,
    k: u32,
    range: DRange,
    opts: &SweepOptions,
    pool: &rayon::ThreadPool,
    stop: &AtomicBool,
    mut emit: impl FnMut(&[CountRecord]) -> Result<(), CliError>,
) -> Result<(SweepReport, bool), CliError> {
    let mut all = Vec::new();
    let mut truncated = false;
    if range.lo <= range.hi {
        let slots = (range.hi - range.lo) / range.stride + 1;
        let mut b = 0;
        while b < slots {
            if stop.load(Ordering::SeqCst) {
                truncated = true;
                break;
            }
            let n = BLOCK_SLOTS.min(slots - b);
            let lo = range.lo + b * range.stride;
            let hi = lo + (n - 1) * range.stride;
            let plan = plan_range(ctx, k, lo, hi, range.stride, opts)?;
            let tally: Result<RangeTally, Stop> = pool.install(|| {
                plan.tasks
                    .par_iter()
                    .try_fold(
                        || plan.empty_tally(),
                        |mut t, task| {
                            if stop.load(Ordering::Relaxed) {
                                return Err(Stop::Interrupted);
                            }
                            plan.run(ctx, task, &mut t).map_err(Stop::Core)?;
                            Ok(t)
                        },
                    )
                    .try_reduce(|| plan.empty_tally(), |a, b| Ok(a.merge(b)))
            });
            let tally = match tally {
                Ok(t) => t,
                Err(Stop::Interrupted) => {
                    truncated = true;
                    break;
                }
                Err(Stop::Core(e)) => return Err(e.into()),
            };
            let mut recs = plan.records(ctx, &tally);
            if let Some(cfg) = &opts.errors {
                pool.install(|| recs.par_iter_mut().try_for_each(|r| fill_error_terms(ctx, r, cfg)))?;
            }
            emit(&recs)?;
            all.extend(recs);
            b += n;
        }
    }
    let report = SweepReport::from_records(ctx, k, range.lo, range.hi, range.stride, all)?;
    Ok((report, truncated))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletRow {
    pub x: u64,
    /// `T(x) = sum_{l < x} N_alpha(floor(l^alpha))`.
    pub triplet_count: u64,
    /// `alpha (beta - 1) + 1`.
    pub exponent: f64,
    /// `T(x) / x^exponent`.
    pub normalized: f64,
    /// `beta alpha^-beta zeta(beta) / exponent`.
    pub target: f64,
    pub relative_gap: f64,
}

pub fn triplets(ctx: &AlphaContext, x: u64, pool: &rayon::ThreadPool) -> Result<TripletRow, CliError> {
    if x == 0 {
        return Err(CliError::config("--x must be at least 1"));
    }
    let counts: Vec<u64> = pool.install(|| {
        (1..x)
            .into_par_iter()
            .map(|l| {
                let d = u64::try_from(floor_pow(l, ctx)).map_err(|_| Error::Domain("floor(l^alpha) exceeds 64 bits"))?;
                Ok(pair_count(ctx, d)?.pair_count)
            })
            .collect::<Result<_, Error>>()
    })?;
    let total: u64 = counts.iter().sum();
    let exponent = ctx.alpha() * (ctx.beta() - 1.0) + 1.0;
    let normalized = total as f64 / (x as f64).powf(exponent);
    let target = asymptotic_constant(ctx, 2)? / exponent;
    Ok(TripletRow { x, triplet_count: total, exponent, normalized, target, relative_gap: (normalized - target).abs() / target })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub alpha: String,
    pub beta: f64,
    pub k: u32,
    pub zeta_beta: f64,
    pub target_constant: f64,
    pub c1: f64,
    pub c2: f64,
    pub below_sqrt2_threshold: bool,
    pub in_theorem_range: bool,
    pub below_e2_threshold: bool,
}

pub fn constants(ctx: &AlphaContext, k: u32) -> Result<ConstantsRow, CliError> {
    let cfg = default_constants(ctx)?;
    let RegimeFlags { below_sqrt2_threshold, in_theorem_range, below_e2_threshold } = ctx.regime_flags();
    Ok(ConstantsRow {
        alpha: ctx.exponent().to_string(),
        beta: ctx.beta(),
        k,
        zeta_beta: zeta(ctx.beta(), 1e-13)?,
        target_constant: asymptotic_constant(ctx, k)?,
        c1: cfg.c1,
        c2: cfg.c2,
        below_sqrt2_threshold,
        in_theorem_range,
        below_e2_threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicRow {
    pub h1: i64,
    pub h2: i64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub name: String,
    pub n_points: usize,
    pub exact_discrepancy: f64,
    pub etk_bound: f64,
    pub big_h: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub name: String,
    pub measure: f64,
    pub count_min: u64,
    pub count_max: u64,
    /// Midpoint count over `d^(beta-1)`.
    pub density: f64,
    /// `beta (c2 - c1) mu / (r alpha)^beta`.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub r: u64,
    pub d: u64,
    pub c1: f64,
    pub c2: f64,
    pub m: u64,
    pub n: u64,
    pub harmonics: Vec<HarmonicRow>,
    pub projections: Vec<ProjectionRow>,
    pub regions: Vec<RegionRow>,
}

/// Longest window whose points are held in memory for the exact discrepancy.
pub const PROJECTION_CAP: u64 = 50_000_000;

pub struct EquidistParams {
    pub r: u64,
    pub d: u64,
    pub c1: f64,
    pub c2: f64,
    pub harmonics: Vec<(i64, i64)>,
    pub big_h: u32,
    pub k: u32,
    pub epsilon: f64,
}

fn projection(name: &str, rep: DiscrepancyReport) -> ProjectionRow {
    ProjectionRow {
        name: name.into(),
        n_points: rep.n_points,
        exact_discrepancy: rep.exact_discrepancy,
        etk_bound: rep.etk_bound,
        big_h: rep.big_h,
    }
}

pub fn equidist(ctx: &AlphaContext, p: &EquidistParams, pool: &rayon::ThreadPool) -> Result<EquidistReport, CliError> {
    let w = WindowSpec::new(ctx, p.r, p.d, p.c1, p.c2)?;
    w.check()?;
    if w.len() > PROJECTION_CAP {
        return Err(Error::ResourceLimit { what: "window length", needed: w.len() as u128, cap: PROJECTION_CAP as u128 }.into());
    }
    let harmonics = pool.install(|| {
        p.harmonics
            .par_iter()
            .map(|&(h1, h2)| Ok(HarmonicRow { h1, h2, magnitude: weyl_sum(ctx, &w, h1, h2)? }))
            .collect::<Result<Vec<_>, Error>>()
    })?;

    let h2r = w.r as i64;
    let (y0, y1): (Vec<f64>, Vec<f64>) = PhaseStream::new(ctx, w.m, w.n).map(|pt| (pt.phase(1, 0).0, pt.phase(0, h2r).0)).unzip();
    let (a, b) = pool.install(|| rayon::join(|| discrepancy_report(&y0, p.big_h), || discrepancy_report(&y1, p.big_h)));
    let projections = vec![projection("n^alpha", a?), projection("r alpha n^(alpha-1)", b?)];

    let sets: Vec<(&str, Box<dyn Membership + Sync>)> = vec![
        ("unit_square", Box::new(UnitSquare)),
        ("quarter_square", Box::new(Rect { x0: 0.0, x1: 0.5, y0: 0.0, y1: 0.5 })),
        ("c_minus", Box::new(ConvexRegion::new(p.k, p.epsilon, RegionSign::Minus)?)),
        ("c_plus", Box::new(ConvexRegion::new(p.k, p.epsilon, RegionSign::Plus)?)),
    ];
    let regions = pool.install(|| {
        sets.par_iter()
            .map(|(name, set)| {
                let c = short_interval_count(ctx, &w, set.as_ref())?;
                Ok(RegionRow {
                    name: (*name).into(),
                    measure: set.measure(),
                    count_min: c.count_min,
                    count_max: c.count_max,
                    density: c.density,
                    predicted: c.predicted,
                })
            })
            .collect::<Result<Vec<_>, Error>>()
    })?;
    Ok(EquidistReport { r: w.r, d: w.d, c1: w.c1, c2: w.c2, m: w.m, n: w.n, harmonics, projections, regions })
}

/// `E_1(d)` and `E_2(d)` at a few differences, for decay checks.
pub fn error_terms_at(ctx: &AlphaContext, ds: &[u64], cfg: &ErrorTermConfig) -> Result<Vec<(u64, u64, u64)>, CliError> {
    ds.iter()
        .map(|&d| Ok((d, error_term_e1(ctx, d, cfg)?, error_term_e2(ctx, d, cfg)?)))
        .collect()
}
