//! Exact counting kernels for Piatetski–Shapiro sequences `floor(n^alpha)`.
//!
//! The crate is `no_std` (with `alloc`). Every floor or fractional-part
//! decision is certified: double precision is used only when its error
//! budget separates the value from the nearest integer, and otherwise the
//! decision is made with exact big-integer roots.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alpha;
pub mod certreal;
pub mod counting;
pub mod equidist;
pub mod error;
pub mod math;
pub mod oracles;

pub use alpha::{AlphaContext, Exponent, PrecisionPolicy, RegimeFlags};
pub use certreal::{CertifiedValue, GapProbe};
pub use error::{Error, Result};
