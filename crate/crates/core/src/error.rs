use thiserror::Error;

/// Failure modes shared by every kernel in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// The exponent string could not be parsed or is outside `(1, 2)`.
    #[error("invalid exponent `{input}`: {reason}")]
    InvalidExponent { input: alloc::string::String, reason: &'static str },

    /// A certified decision could not be reached within the configured precision cap.
    #[error("precision exhausted at {bits} bits (n={n:?}, r={r:?}, d={d:?})")]
    PrecisionExhausted {
        bits: u32,
        n: Option<u64>,
        r: Option<u64>,
        d: Option<u64>,
    },

    /// The requested accuracy is below what the evaluation can certify.
    #[error("tolerance {0:e} cannot be certified")]
    Tolerance(f64),

    /// Work would exceed a configured cap.
    #[error("resource limit: {what} would need {needed}, cap is {cap}")]
    ResourceLimit { what: &'static str, needed: u128, cap: u128 },

    #[error("empty input")]
    EmptyInput,

    /// A short window `[M, N)` with `N <= M`.
    #[error("degenerate window: M={m}, N={n}")]
    DegenerateWindow { m: u64, n: u64 },
}

impl Error {
    /// Attach counting coordinates to a precision failure.
    pub fn at(self, n: Option<u64>, r: Option<u64>, d: Option<u64>) -> Self {
        match self {
            Error::PrecisionExhausted { bits, n: n0, r: r0, d: d0 } => Error::PrecisionExhausted {
                bits,
                n: n0.or(n),
                r: r0.or(r),
                d: d0.or(d),
            },
            other => other,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
