use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::sync::atomic::Ordering;

use clap::{Parser, Subcommand};

use pslab::config::{exit, parse_d_range, parse_harmonics, parse_window, CliError, DRange, Format, RunConfig};
use pslab::exec::{self, EquidistParams, INTERRUPTED};
use pslab::report::{write_json, CountReport, CountRow, CsvWriter, Meta, Summary, COUNT_COLUMNS, SWEEP_COLUMNS};
use pslab::report::real;
use pslab::verify::{self, VerifyOptions};
use pslab_core::counting::SweepOptions;

/// Exact counts and equidistribution experiments for floor(n^alpha).
#[derive(Parser, Debug)]
#[command(name = "pslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Exponent in (1, 2), decimal or p/q.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Progression length.
    #[arg(long, global = true, default_value_t = 2)]
    k: u32,
    #[arg(long, global = true)]
    d: Option<u64>,
    /// LO:HI[:STRIDE]
    #[arg(long = "d-range", global = true, value_parser = parse_d_range)]
    d_range: Option<DRange>,
    #[arg(long, global = true)]
    x: Option<u64>,
    /// Step r (equidist), or the tail cut R for E_0 (count).
    #[arg(long, global = true)]
    r: Option<u64>,
    /// Error-term constant c1 (with --c2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    c1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    c2: Option<f64>,
    /// Window constants C1:C2 with C2 - C1 a positive integer.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    /// H1:H2[,H1:H2...]
    #[arg(long, global = true, value_parser = parse_harmonics, allow_hyphen_values = true)]
    harmonics: Option<Vec<(i64, i64)>>,
    /// Harmonic cut-off for the Erdős–Turán–Koksma bound.
    #[arg(long = "H", global = true)]
    big_h: Option<u32>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Fill E_1 and E_2 columns.
    #[arg(long, global = true)]
    errors: bool,
    /// Verification suite (repeatable): oracle, derivatives, discrepancy, regions.
    #[arg(long = "suite", global = true)]
    suites: Vec<String>,
    #[arg(long, global = true)]
    dmax: Option<u64>,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Precision cap in bits for certified decisions.
    #[arg(long = "max-bits", global = true, env = "PSLAB_MAX_BITS", default_value_t = 4096)]
    max_bits: u32,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// N_alpha(d) and N_{alpha,k}(d) for one difference.
    Count,
    /// Stream counts over a range of differences.
    Sweep,
    /// T(x) against its limit.
    Triplets,
    /// Weyl sums, discrepancy and region densities on one short window.
    Equidist,
    /// Run the verification suites.
    Verify,
    /// Limit constant, zeta(beta) and default error-term constants.
    Constants,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Sweep => "sweep",
            Command::Triplets => "triplets",
            Command::Equidist => "equidist",
            Command::Verify => "verify",
            Command::Constants => "constants",
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let alpha = match (&cli.alpha, cli.command) {
        (Some(a), _) => a.clone(),
        (None, Command::Verify) => "3/2".into(),
        (None, _) => return Err(CliError::config("--alpha is required")),
    };
    let mut cfg = RunConfig::new(cli.command.name(), &alpha)?;
    cfg.k = cli.k;
    cfg.d = cli.d;
    cfg.d_range = cli.d_range;
    cfg.x = cli.x;
    cfg.r = cli.r;
    cfg.c1 = cli.c1;
    cfg.c2 = cli.c2;
    cfg.window = cli.window;
    cfg.harmonics = cli.harmonics.clone().unwrap_or_default();
    cfg.big_h = cli.big_h;
    cfg.epsilon = cli.epsilon;
    cfg.errors = cli.errors;
    cfg.suites = cli.suites.clone();
    cfg.dmax = cli.dmax;
    cfg.max_bits = cli.max_bits;
    cfg.seed = cli.seed;
    cfg.format = cli.format;
    cfg.out = cli.out.clone();
    cfg.workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if cfg.k < 2 {
        return Err(CliError::config("--k must be at least 2"));
    }
    if cfg.workers == 0 {
        return Err(CliError::config("--workers must be at least 1"));
    }
    Ok(cfg)
}

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::config(format!("cannot create {p}: {e}")))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("{flag} is required")))
}

fn cmd_count(cfg: &RunConfig) -> Result<i32, CliError> {
    let ctx = cfg.context()?;
    let d = need(cfg.d, "--d")?;
    if d == 0 {
        return Err(CliError::config("--d must be at least 1"));
    }
    let errors = if cfg.errors { Some(exec::error_constants(&ctx, cfg.c1, cfg.c2)?) } else { None };
    let (rec, tail) = exec::count(&ctx, d, cfg.k, errors.as_ref(), cfg.r)?;
    let row = CountRow { tail_e0: tail, ..CountRow::from_record(&rec, cfg.k) };
    let meta = Meta::new(cfg);
    let mut out = output(cfg)?;
    match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(&mut out, &COUNT_COLUMNS)?;
            w.row(&row.count_fields())?;
            w.comment(&meta.comment())?;
            w.flush()?;
        }
        Format::Json => write_json(&mut out, &CountReport { meta, rows: vec![row], summary: None, truncated: false })?,
    }
    out.flush()?;
    Ok(exit::OK)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<i32, CliError> {
    let ctx = cfg.context()?;
    let range = need(cfg.d_range, "--d-range")?;
    let opts = SweepOptions {
        errors: if cfg.errors { Some(exec::error_constants(&ctx, cfg.c1, cfg.c2)?) } else { None },
        ..SweepOptions::default()
    };
    let pool = exec::thread_pool(cfg.workers)?;
    exec::install_interrupt_handler()?;
    let meta = Meta::new(cfg);
    let mut out = output(cfg)?;
    let k = cfg.k;
    let (report, truncated) = match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(&mut out, &SWEEP_COLUMNS)?;
            let res = exec::sweep(&ctx, k, range, &opts, &pool, &INTERRUPTED, |recs| {
                for r in recs {
                    w.row(&CountRow::from_record(r, k).sweep_fields())?;
                }
                Ok(w.flush()?)
            });
            let (report, truncated) = res?;
            if truncated {
                w.comment("truncated")?;
            }
            w.comment(&meta.comment())?;
            w.comment(&Summary::from_report(&report).comment())?;
            w.flush()?;
            (report, truncated)
        }
        Format::Json => {
            let (report, truncated) = exec::sweep(&ctx, k, range, &opts, &pool, &INTERRUPTED, |_| Ok(()))?;
            let rows = report.records.iter().map(|r| CountRow::from_record(r, k)).collect();
            write_json(&mut out, &CountReport { meta, rows, summary: Some(Summary::from_report(&report)), truncated })?;
            (report, truncated)
        }
    };
    out.flush()?;
    drop(report);
    Ok(if truncated { 130 } else { exit::OK })
}

fn cmd_triplets(cfg: &RunConfig) -> Result<i32, CliError> {
    let ctx = cfg.context()?;
    let x = need(cfg.x, "--x")?;
    let pool = exec::thread_pool(cfg.workers)?;
    let row = exec::triplets(&ctx, x, &pool)?;
    let meta = Meta::new(cfg);
    let mut out = output(cfg)?;
    match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(&mut out, &["x", "triplet_count", "exponent", "normalized", "target", "relative_gap"])?;
            w.row(&[
                row.x.to_string(),
                row.triplet_count.to_string(),
                real(row.exponent),
                real(row.normalized),
                real(row.target),
                real(row.relative_gap),
            ])?;
            w.comment(&meta.comment())?;
            w.flush()?;
        }
        Format::Json => write_json(&mut out, &serde_json::json!({ "meta": meta, "row": row }))?,
    }
    out.flush()?;
    Ok(exit::OK)
}

fn cmd_constants(cfg: &RunConfig) -> Result<i32, CliError> {
    let ctx = cfg.context()?;
    let row = exec::constants(&ctx, cfg.k)?;
    let meta = Meta::new(cfg);
    let mut out = output(cfg)?;
    match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(
                &mut out,
                &[
                    "alpha",
                    "beta",
                    "k",
                    "zeta_beta",
                    "target_constant",
                    "c1",
                    "c2",
                    "below_sqrt2_threshold",
                    "in_theorem_range",
                    "below_e2_threshold",
                ],
            )?;
            w.row(&[
                row.alpha.clone(),
                real(row.beta),
                row.k.to_string(),
                real(row.zeta_beta),
                real(row.target_constant),
                real(row.c1),
                real(row.c2),
                row.below_sqrt2_threshold.to_string(),
                row.in_theorem_range.to_string(),
                row.below_e2_threshold.to_string(),
            ])?;
            w.comment(&meta.comment())?;
            w.flush()?;
        }
        Format::Json => write_json(&mut out, &serde_json::json!({ "meta": meta, "row": row }))?,
    }
    out.flush()?;
    Ok(exit::OK)
}

/// Always JSON: the report is nested.
fn cmd_equidist(cfg: &RunConfig) -> Result<i32, CliError> {
    let ctx = cfg.context()?;
    let (c1, c2) = cfg.window.unwrap_or((0.0, 1.0));
    let params = EquidistParams {
        r: cfg.r.unwrap_or(1),
        d: need(cfg.d, "--d")?,
        c1,
        c2,
        harmonics: if cfg.harmonics.is_empty() { vec![(1, 0), (0, 1), (1, 1)] } else { cfg.harmonics.clone() },
        big_h: cfg.big_h.unwrap_or(16),
        k: cfg.k,
        epsilon: cfg.epsilon.unwrap_or(0.1),
    };
    let pool = exec::thread_pool(cfg.workers)?;
    let report = exec::equidist(&ctx, &params, &pool)?;
    let mut out = output(cfg)?;
    write_json(&mut out, &serde_json::json!({ "meta": Meta::new(cfg), "report": report }))?;
    out.flush()?;
    Ok(exit::OK)
}

fn cmd_verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let opts = VerifyOptions { dmax: cfg.dmax.unwrap_or(1000), seed: cfg.seed, max_bits: cfg.max_bits };
    let pool = exec::thread_pool(cfg.workers)?;
    let results = verify::run(&cfg.suites, &opts, &pool)?;
    let mut out = output(cfg)?;
    write_json(&mut out, &results)?;
    out.flush()?;
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::failed(format!(
            "suite {} failed: {}",
            r.suite,
            r.failure.as_deref().unwrap_or("unknown assertion")
        ))),
        None => Ok(exit::OK),
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = config(cli)?;
    match cli.command {
        Command::Count => cmd_count(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Triplets => cmd_triplets(&cfg),
        Command::Equidist => cmd_equidist(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Constants => cmd_constants(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pslab: {e}");
            e.code
        }
    };
    if INTERRUPTED.load(Ordering::SeqCst) {
        eprintln!("pslab: interrupted");
    }
    ExitCode::from(code as u8)
}
