//! Report rows and their CSV/JSON encodings.
//!
//! Integers are written verbatim and reals in the shortest form that parses
//! back to the same double, so reports diff cleanly across runs.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use pslab_core::counting::{CountRecord, SweepReport};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip decimal.
pub fn real(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub alpha: String,
    pub k: u32,
    pub version: String,
    pub config_hash: String,
}

impl Meta {
    pub fn new(cfg: &RunConfig) -> Self {
        Meta {
            command: cfg.command.clone(),
            alpha: cfg.alpha.clone(),
            k: cfg.k,
            version: VERSION.into(),
            config_hash: cfg.hash(),
        }
    }

    pub fn comment(&self) -> String {
        format!("{} alpha={} k={} version={} config={}", self.command, self.alpha, self.k, self.version, self.config_hash)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub d: u64,
    pub pair_count: u64,
    /// `N_{alpha,k}(d)` for the configured `k` (equal to `pair_count` when `k = 2`).
    pub kap_k: u64,
    /// `kap_k / d^(beta-1)`.
    pub ratio: f64,
    pub e1: Option<u64>,
    pub e2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_e0: Option<u64>,
}

pub const SWEEP_COLUMNS: [&str; 6] = ["d", "pair_count", "kap_k", "ratio", "e1", "e2"];
pub const COUNT_COLUMNS: [&str; 7] = ["d", "pair_count", "kap_k", "ratio", "e1", "e2", "tail_e0"];

impl CountRow {
    pub fn from_record(rec: &CountRecord, k: u32) -> Self {
        CountRow {
            d: rec.d,
            pair_count: rec.pair_count,
            kap_k: rec.kap(k).expect("record carries the configured k"),
            ratio: rec.normalized_ratio,
            e1: rec.e1,
            e2: rec.e2,
            tail_e0: None,
        }
    }

    pub fn sweep_fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.pair_count.to_string(),
            self.kap_k.to_string(),
            real(self.ratio),
            opt(self.e1),
            opt(self.e2),
        ]
    }

    pub fn count_fields(&self) -> Vec<String> {
        let mut f = self.sweep_fields();
        f.push(opt(self.tail_e0));
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub window_mean_ratio: Option<f64>,
    pub target_constant: f64,
    pub relative_gap: Option<f64>,
}

impl Summary {
    pub fn from_report(r: &SweepReport) -> Self {
        Summary { window_mean_ratio: r.window_mean_ratio, target_constant: r.target_constant, relative_gap: r.relative_gap }
    }

    pub fn comment(&self) -> String {
        format!(
            "window_mean_ratio={} target_constant={} relative_gap={}",
            self.window_mean_ratio.map(real).unwrap_or_default(),
            real(self.target_constant),
            self.relative_gap.map(real).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub meta: Meta,
    pub rows: Vec<CountRow>,
    pub summary: Option<Summary>,
    pub truncated: bool,
}

/// CSV with a mandatory header; `#` comments may only follow the rows.
pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
    in_comments: bool,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter { out, columns: header.len(), in_comments: false })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        assert!(!self.in_comments, "rows after comments");
        assert_eq!(fields.len(), self.columns, "column count");
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        self.in_comments = true;
        writeln!(self.out, "# {text}")
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize, W: Write>(mut out: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()
}
