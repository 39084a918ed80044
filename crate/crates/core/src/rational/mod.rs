//! Polynomial and rational-function arithmetic, state-space conversion and pole location.

mod poles;
mod poly;
mod ss;
mod tf;

pub use poles::{pole_report, PoleReport, CANCELLATION_TOL};
pub use poly::{Polynomial, ROOT_RESIDUAL_TOL};
pub use ss::{characteristic_polynomial, StateSpace};
pub use tf::RationalTransferFunction;
