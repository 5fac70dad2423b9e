//! Certified real arithmetic: powers, zeta, and the gap function `f_r`.

pub mod cert;
pub mod dd;
pub mod exact;
mod gap;
mod interval;
pub(crate) mod power;
mod zeta;

pub use gap::{
    boundary, floor_inverse, gap_eval, gap_inverse, gap_probe, inverse_second_derivative, inverse_third_derivative_ratio,
    second_derivative_closed, solve_inverse_f64, third_ratio_closed, GapInverse, GapProbe,
};
pub use interval::CertifiedValue;
pub use power::{exact_floor_pow, floor_pow, frac_pow, FloorCursor, PowerSeries};
pub use zeta::{asymptotic_constant, zeta};
