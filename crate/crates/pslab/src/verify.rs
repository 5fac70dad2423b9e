//! Verification suites: the fast kernels against independent oracles.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pslab_core::certreal::{boundary, inverse_second_derivative, inverse_third_derivative_ratio};
use pslab_core::counting::{oracle_pair_table, pair_count, ORACLE_LENGTH_CAP};
use pslab_core::equidist::{discrepancy_exact, etk_bound, region_measure, ConvexRegion, RegionSign};
use pslab_core::oracles::{discrepancy_brute, grid_measure, inverse_derivatives_fd};
use pslab_core::{AlphaContext, Error};

use crate::config::CliError;

pub const SUITES: [&str; 4] = ["oracle", "derivatives", "discrepancy", "regions"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: u64,
    /// First failing assertion, with its inputs.
    pub failure: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub dmax: u64,
    pub seed: u64,
    pub max_bits: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { dmax: 1000, seed: 7, max_bits: 4096 }
    }
}

struct Checker {
    suite: &'static str,
    checks: u64,
    failure: Option<String>,
    notes: Vec<String>,
}

impl Checker {
    fn new(suite: &'static str) -> Self {
        Checker { suite, checks: 0, failure: None, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            suite: self.suite.into(),
            passed: self.failure.is_none(),
            checks: self.checks,
            failure: self.failure,
            notes: self.notes,
        }
    }
}

/// Largest `d <= want` whose oracle table fits the sequence-length cap.
pub fn oracle_reach(ctx: &AlphaContext, want: u64) -> Result<u64, Error> {
    let fits = |d: u64| -> Result<bool, Error> { Ok(boundary(ctx, 1, d + 1)? <= ORACLE_LENGTH_CAP) };
    if fits(want)? {
        return Ok(want);
    }
    let (mut lo, mut hi) = (0, want);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn oracle_suite(opts: &VerifyOptions, pool: &rayon::ThreadPool) -> Result<SuiteResult, CliError> {
    let mut c = Checker::new("oracle");
    for a in ["1.2", "1.5", "1.7"] {
        let ctx = context(a, opts.max_bits)?;
        let dmax = oracle_reach(&ctx, opts.dmax)?;
        if dmax < opts.dmax {
            c.notes.push(format!(
                "alpha={a}: oracle stops at d={dmax}; a table to d={} would walk past {ORACLE_LENGTH_CAP} sequence terms",
                opts.dmax
            ));
        }
        if dmax == 0 {
            continue;
        }
        let table = oracle_pair_table(&ctx, dmax, ORACLE_LENGTH_CAP)?;
        let got: Vec<u64> = pool.install(|| {
            (1..=dmax).into_par_iter().map(|d| Ok(pair_count(&ctx, d)?.pair_count)).collect::<Result<_, Error>>()
        })?;
        for (d, g) in (1..=dmax).zip(got) {
            let want = table[&d];
            c.check(g == want, || format!("alpha={a} d={d}: pair_count={g}, oracle={want}"));
        }
    }
    Ok(c.finish())
}

fn derivative_suite(opts: &VerifyOptions) -> Result<SuiteResult, CliError> {
    let mut c = Checker::new("derivatives");
    for a in ["1.3", "1.5", "1.7"] {
        let ctx = context(a, opts.max_bits)?;
        for r in [1u64, 5, 20] {
            for d in [1_000u64, 100_000] {
                let (fd2, fd3) = inverse_derivatives_fd(r as f64, d as f64, ctx.alpha(), 1e-3 * r as f64);
                let y2 = inverse_second_derivative(r, d, &ctx)?;
                let y3 = inverse_third_derivative_ratio(r, d, &ctx)?;
                let e2 = ((y2 - fd2) / fd2).abs();
                let e3 = ((y3 - fd3) / fd3).abs();
                c.check(e2 <= 1e-5, || format!("alpha={a} r={r} d={d}: y''={y2}, finite difference {fd2}, rel err {e2:e}"));
                c.check(e3 <= 1e-4, || format!("alpha={a} r={r} d={d}: -y'''/y''={y3}, finite difference {fd3}, rel err {e3:e}"));
            }
        }
    }
    Ok(c.finish())
}

fn discrepancy_suite(opts: &VerifyOptions) -> Result<SuiteResult, CliError> {
    let mut c = Checker::new("discrepancy");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..200 {
        let n = rng.gen_range(1..=50);
        let pts: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let exact = discrepancy_exact(&pts)?;
        let brute = discrepancy_brute(&pts);
        c.check((exact - brute).abs() <= 1e-12, || format!("set {i} (N={n}): exact {exact}, brute force {brute}"));
        let bound = etk_bound(&pts, 16)?;
        c.check(exact <= bound, || format!("set {i} (N={n}): exact {exact} exceeds ETK bound {bound}"));
    }
    for n in 2..=64u32 {
        let pts: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let exact = discrepancy_exact(&pts)?;
        // `i/N` itself is rounded to binary, which moves the discrepancy by up to an ulp.
        let gap = (exact - 1.0 / n as f64).abs();
        c.check(gap <= f64::EPSILON, || format!("equally spaced N={n}: {exact}, off 1/N by {gap:e}"));
        let bound = etk_bound(&pts, n)?;
        c.check(exact <= bound, || format!("equally spaced N={n}: exact {exact} exceeds ETK bound {bound}"));
    }
    Ok(c.finish())
}

fn region_suite() -> Result<SuiteResult, CliError> {
    let mut c = Checker::new("regions");
    for k in [2u32, 3, 5] {
        for eps in [0.0, 0.1, 0.5] {
            for sign in [RegionSign::Minus, RegionSign::Plus] {
                let region = ConvexRegion::new(k, eps, sign)?;
                let g = grid_measure(&region, 1e-3);
                let m = region_measure(&region);
                c.check((g - m).abs() <= 1e-3, || format!("k={k} eps={eps} {sign:?}: grid {g}, closed form {m}"));
            }
        }
    }
    Ok(c.finish())
}

fn context(alpha: &str, max_bits: u32) -> Result<AlphaContext, CliError> {
    let ctx = AlphaContext::parse(alpha)?;
    let policy = pslab_core::PrecisionPolicy { max_bits, ..ctx.policy };
    Ok(ctx.with_policy(policy))
}

/// Run the named suites (all when empty) in the order given.
pub fn run(suites: &[String], opts: &VerifyOptions, pool: &rayon::ThreadPool) -> Result<Vec<SuiteResult>, CliError> {
    for s in suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(CliError::config(format!("unknown suite `{s}` (known: {})", SUITES.join(", "))));
        }
    }
    let names: Vec<&str> = if suites.is_empty() { SUITES.to_vec() } else { suites.iter().map(String::as_str).collect() };
    names
        .into_iter()
        .map(|s| match s {
            "oracle" => oracle_suite(opts, pool),
            "derivatives" => derivative_suite(opts),
            "discrepancy" => discrepancy_suite(opts),
            _ => region_suite(),
        })
        .collect()
}
