//! Equidistribution tools: exact discrepancy, Erdős–Turán–Koksma bounds,
//! Weyl sums over the short windows `[M(d), N(d))`, derivative-test shapes,
//! and the convex regions `C_k^{+-}(eps)`.

mod discrepancy;
mod phase;
mod regions;
mod short;
mod weyl;

pub use discrepancy::{discrepancy_exact, discrepancy_report, etk_bound, harmonic_magnitudes, DiscrepancyReport};
pub use phase::{PairwiseSum, PhasePoint, PhaseStream, PHASE_BUDGET};
pub use regions::{region_measure, ConvexRegion, RegionSign};
pub use short::{short_interval_count, EmptySet, Membership, Rect, ShortIntervalCount, UnitSquare};
pub use weyl::{exp_sum, sargos_bound, vdc_bound, derivative_test_scan, weyl_sum, DerivativeTestRow, WindowSpec};
