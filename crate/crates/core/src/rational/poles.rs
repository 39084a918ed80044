use num_complex::Complex64;

use super::tf::RationalTransferFunction;
use crate::error::Result;

/// Relative distance under which a pole and a zero cancel.
pub const CANCELLATION_TOL: f64 = 1e-9;

/// Poles of `W` (after near pole-zero cancellation) located against the line `Re(s) = -lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    pub poles: Vec<Complex64>,
    /// Poles of `W_lambda` in the open right half-plane.
    pub count_right_of_line: usize,
    /// Poles of `W_lambda` on the imaginary axis.
    pub count_on_line: usize,
    pub lambda: f64,
}

impl PoleReport {
    /// Poles of `W_lambda`, i.e. the poles of `W` translated by `lambda`.
    pub fn shifted_poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.poles.iter().map(move |p| p + self.lambda)
    }
}

fn line_tol(p: Complex64) -> f64 {
    1e-9 * (1.0 + p.norm())
}

/// Poles of `W` with their position relative to `Re(s) = -lambda`.
pub fn pole_report(w: &RationalTransferFunction, lambda: f64) -> Result<PoleReport> {
    w.ensure_proper()?;
    let mut poles = w.den().roots()?;
    if !w.num().is_zero() {
        let mut zeros = w.num().roots()?;
        poles.retain(|p| {
            let hit = zeros
                .iter()
                .position(|z| (z - p).norm() <= CANCELLATION_TOL * (1.0 + p.norm()));
            match hit {
                Some(i) => {
                    zeros.swap_remove(i);
                    false
                }
                None => true,
            }
        });
    }
    let mut right = 0;
    let mut on = 0;
    for &p in &poles {
        let offset = p.re + lambda;
        if offset.abs() <= line_tol(p) {
            on += 1;
        } else if offset > 0.0 {
            right += 1;
        }
    }
    Ok(PoleReport {
        poles,
        count_right_of_line: right,
        count_on_line: on,
        lambda,
    })
}
