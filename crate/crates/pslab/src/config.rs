use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pslab_core::{AlphaContext, Error, PrecisionPolicy};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A run or verification finished but something it checked failed.
    pub const FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    /// A certified decision ran past the precision cap, or a window was empty.
    pub const PRECISION: i32 = 3;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: exit::CONFIG, message: message.into() }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        CliError { code: exit::FAILED, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionExhausted { .. } | Error::DegenerateWindow { .. } => exit::PRECISION,
            Error::Domain(_) | Error::InvalidExponent { .. } | Error::EmptyInput | Error::Tolerance(_) => exit::CONFIG,
            Error::ResourceLimit { .. } => exit::FAILED,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::failed(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DRange {
    pub lo: u64,
    pub hi: u64,
    pub stride: u64,
}

/// `LO:HI[:STRIDE]`; `LO > HI` is an empty range, not an error.
pub fn parse_d_range(s: &str) -> Result<DRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected LO:HI[:STRIDE], got `{s}`"));
    }
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("`{t}` is not a nonnegative integer"));
    let lo = num(parts[0])?;
    let hi = num(parts[1])?;
    let stride = if parts.len() == 3 { num(parts[2])? } else { 1 };
    if lo == 0 {
        return Err("differences start at 1".into());
    }
    if stride == 0 {
        return Err("stride must be at least 1".into());
    }
    Ok(DRange { lo, hi, stride })
}

/// `C1:C2`.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected C1:C2, got `{s}`"))?;
    let f = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok((f(a)?, f(b)?))
}

/// `H1:H2[,H1:H2...]`.
pub fn parse_harmonics(s: &str) -> Result<Vec<(i64, i64)>, String> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| format!("expected H1:H2, got `{pair}`"))?;
            let i = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer"));
            Ok((i(a)?, i(b)?))
        })
        .collect()
}

/// Everything that determines a report. `out` and `workers` are kept out of
/// the hash: neither changes a single byte of the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Canonical `p/q`.
    pub alpha: String,
    pub k: u32,
    pub d: Option<u64>,
    pub d_range: Option<DRange>,
    pub x: Option<u64>,
    pub r: Option<u64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub harmonics: Vec<(i64, i64)>,
    pub big_h: Option<u32>,
    pub epsilon: Option<f64>,
    pub errors: bool,
    pub suites: Vec<String>,
    pub dmax: Option<u64>,
    pub max_bits: u32,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip)]
    pub workers: usize,
}

impl RunConfig {
    pub fn new(command: &str, alpha: &str) -> Result<Self, CliError> {
        let ctx = AlphaContext::parse(alpha)?;
        Ok(RunConfig {
            command: command.into(),
            alpha: ctx.exponent().to_string(),
            k: 2,
            d: None,
            d_range: None,
            x: None,
            r: None,
            c1: None,
            c2: None,
            window: None,
            harmonics: Vec::new(),
            big_h: None,
            epsilon: None,
            errors: false,
            suites: Vec::new(),
            dmax: None,
            max_bits: PrecisionPolicy::default().max_bits,
            seed: 7,
            format: Format::Csv,
            out: None,
            workers: 1,
        })
    }

    pub fn context(&self) -> Result<AlphaContext, CliError> {
        if self.max_bits < 64 {
            return Err(CliError::config("--max-bits must be at least 64"));
        }
        let policy = PrecisionPolicy { max_bits: self.max_bits, ..PrecisionPolicy::default() };
        Ok(AlphaContext::parse(&self.alpha)?.with_policy(policy))
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
