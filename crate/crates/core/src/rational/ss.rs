use nalgebra::{DMatrix, DVector, RowDVector};

use super::poly::Polynomial;
use super::tf::RationalTransferFunction;
use crate::error::{Error, Result};

/// `x' = A x + B u`, `y = C x + D u` with scalar input and output.
///
/// A zero-dimensional state (`n = 0`) represents a pure feedthrough `y = D u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>, d: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "A is {}x{}, B has {} rows, C has {} columns",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Controllable canonical realization of a proper transfer function.
    pub fn from_tf(w: &RationalTransferFunction) -> Result<Self> {
        w.ensure_proper()?;
        let den = w.den().coefficients();
        let n = den.len() - 1;
        let d = w.feedthrough();
        // Strictly proper remainder N - d * Den.
        let rem = w.num() - &w.den().scale(d);
        let rem = rem.coefficients();
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 < n {
                if j == i + 1 {
                    1.0
                } else {
                    0.0
                }
            } else {
                -den[j]
            }
        });
        let mut b = DVector::zeros(n);
        if n > 0 {
            b[n - 1] = 1.0;
        }
        let c = RowDVector::from_fn(n, |_, j| rem.get(j).copied().unwrap_or(0.0));
        Ok(Self { a, b, c, d })
    }

    /// `C (sI - A)^{-1} B + D`.
    pub fn to_tf(&self) -> Result<RationalTransferFunction> {
        let den = characteristic_polynomial(&self.a);
        // SISO identity: det(sI - A + BC) = det(sI - A) (1 + C (sI - A)^{-1} B).
        let closed = characteristic_polynomial(&(&self.a - &self.b * &self.c));
        let num = &(&closed - &den) + &den.scale(self.d);
        RationalTransferFunction::new(num, den)
    }

    /// State matrix of the loop closed with the static gain `u = -k y` (requires `D = 0`).
    pub fn closed_loop_a(&self, k: f64) -> DMatrix<f64> {
        &self.a - (&self.b * &self.c) * k
    }
}

/// `det(sI - M)` by the Faddeev-LeVerrier recursion, in ascending order.
pub fn characteristic_polynomial(m: &DMatrix<f64>) -> Polynomial {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk;
        for i in 0..n {
            mk[(i, i)] += coeffs[n - k + 1];
        }
        coeffs[n - k] = -(m * &mk).trace() / k as f64;
    }
    Polynomial::new(coeffs)
}
