//! Gain, phase and disk margins for p-dominance, the circle criterion, and
//! the shifted H-infinity norm.

mod circle;
mod disk;
mod disk_margin;
mod gain;
mod norm;
mod phase;
mod sweep;

pub use circle::{circle_criterion, CircleCriterionReport, SectorCase, SignChangeMode};
pub use disk::{Disk, DiskKind};
pub use disk_margin::{disk_margin_check, DiskMarginReport, MEMBERSHIP_TOL};
pub use gain::{gain_margins, open_loop_degree, GainInterval, GainMarginReport};
pub use norm::hinf_lambda_norm;
pub use phase::{phase_margins, wrap, PhaseInterval, PhaseMarginReport};
pub use sweep::{margin_vs_rate_sweep, one_gain_upper, OptimalRate, SweepRow, SweepTable};
