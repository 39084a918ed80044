//! Dominance margins for SISO feedback systems.
//!
//! The crate computes gain, phase and disk margins for p-dominance from the
//! Nyquist diagram of the shifted transfer function `W_lambda(s) = W(s - lambda)`,
//! certifies p-dominance of linear systems with an indefinite Lyapunov matrix,
//! and simulates Lure systems to check the predicted asymptotic behavior.

pub mod dominance;
pub mod error;
pub mod format;
pub mod lure;
pub mod margins;
pub mod nyquist;
pub mod rational;

pub use error::{Error, Result};
pub use rational::{Polynomial, RationalTransferFunction, StateSpace};
