//! Certificates of strict p-dominance for linear systems `x' = A x`.
//!
//! A certificate is a symmetric `P` with inertia `(n - p, p, 0)` and a slack
//! `epsilon > 0` such that `A^T P + P A + 2 lambda P + epsilon I <= 0`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::format::num;

/// Largest state dimension handled by the dense Lyapunov solver.
pub const MAX_ORDER: usize = 64;

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.negative, self.zero)
    }
}

fn ensure_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Inertia of the symmetric part of `m`; eigenvalues within `1e-9 max|eig|` of zero count as zero.
pub fn inertia(m: &DMatrix<f64>) -> Result<Inertia> {
    ensure_square(m)?;
    let eig = symmetrize(m).symmetric_eigenvalues();
    let tol = 1e-9 * eig.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    for &e in eig.iter() {
        if e.abs() <= tol {
            out.zero += 1;
        } else if e > 0.0 {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
    }
    Ok(out)
}

/// Largest eigenvalue of `A^T P + P A + 2 lambda P + epsilon I`.
pub fn lmi_residual(a: &DMatrix<f64>, p: &DMatrix<f64>, lambda: f64, epsilon: f64) -> f64 {
    let n = a.nrows();
    let m = a.transpose() * p + p * a + p * (2.0 * lambda) + DMatrix::identity(n, n) * epsilon;
    symmetrize(&m).symmetric_eigenvalues().max()
}

/// Number of eigenvalues of `A` with real part greater than `-lambda`.
pub fn dominance_degree_lti(a: &DMatrix<f64>, lambda: f64) -> Result<usize> {
    ensure_square(a)?;
    let mut right = 0;
    for e in a.complex_eigenvalues().iter() {
        let offset = e.re + lambda;
        if offset.abs() <= 1e-9 * (1.0 + e.norm()) {
            return Err(Error::EigOnLine);
        }
        if offset > 0.0 {
            right += 1;
        }
    }
    Ok(right)
}

/// Solves `M^T P + P M = -I` by vectorization.
fn solve_lyapunov(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mt = m.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(&mt) + mt.kronecker(&eye);
    let rhs = -DVector::from_column_slice(eye.as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, sol.as_slice())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceCertificate {
    pub p_matrix: DMatrix<f64>,
    pub lambda: f64,
    pub epsilon: f64,
    pub p: usize,
    /// Largest eigenvalue of `A^T P + P A + 2 lambda P + epsilon I`.
    pub residual: f64,
}

impl DominanceCertificate {
    pub fn inertia(&self) -> Inertia {
        inertia(&self.p_matrix).expect("certificate matrix is square")
    }

    /// Re-checks the certificate against `a`: inertia `(n - p, p, 0)` and a
    /// residual no larger than `tol * ||P||`.
    pub fn verify(&self, a: &DMatrix<f64>, tol: f64) -> bool {
        let n = self.p_matrix.nrows();
        let expected = Inertia { positive: n - self.p, negative: self.p, zero: 0 };
        self.epsilon > 0.0
            && self.inertia() == expected
            && lmi_residual(a, &self.p_matrix, self.lambda, self.epsilon) <= tol * self.p_matrix.norm()
    }

    /// Plain-text form: `lambda`, `p`, `epsilon` and `residual` lines, then `P` and its rows.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "lambda = {}\np = {}\nepsilon = {}\nresidual = {}\nP\n",
            num(self.lambda),
            self.p,
            num(self.epsilon),
            num(self.residual)
        );
        for row in self.p_matrix.row_iter() {
            let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("certificate: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated"))?;
            let (k, v) = line.split_once('=').ok_or_else(|| bad(line))?;
            if k.trim() != name {
                return Err(bad(&format!("expected `{name}`, found `{}`", k.trim())));
            }
            Ok(v.trim().to_string())
        };
        let lambda: f64 = field("lambda")?.parse().map_err(|_| bad("lambda"))?;
        let p: usize = field("p")?.parse().map_err(|_| bad("p"))?;
        let epsilon: f64 = field("epsilon")?.parse().map_err(|_| bad("epsilon"))?;
        let residual: f64 = field("residual")?.parse().map_err(|_| bad("residual"))?;
        if lines.next() != Some("P") {
            return Err(bad("missing `P` header"));
        }
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split_whitespace().map(|c| c.parse::<f64>().map_err(|_| bad(c))).collect())
            .collect::<Result<_>>()?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(bad("P must be square"));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(Self {
            p_matrix: DMatrix::from_row_slice(n, n, &flat),
            lambda,
            epsilon,
            p,
            residual,
        })
    }
}

/// Builds a strict p-dominance certificate for `x' = A x` with rate `lambda`.
///
/// `P` solves `(A + lambda I)^T P + P (A + lambda I) = -I`; `epsilon` is the
/// largest value in `(0, 1]` found by bisection with a non-positive residual.
pub fn certify_lti(a: &DMatrix<f64>, lambda: f64, p: usize) -> Result<DominanceCertificate> {
    let n = ensure_square(a)?;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Dimension(format!("state dimension must be in 1..={MAX_ORDER}, got {n}")));
    }
    let found = dominance_degree_lti(a, lambda)?;
    if found != p {
        return Err(Error::InertiaMismatch { requested: p, found });
    }
    let shifted = a + DMatrix::<f64>::identity(n, n) * lambda;
    let pm = solve_lyapunov(&shifted)?;
    let got = inertia(&pm)?;
    if got != (Inertia { positive: n - p, negative: p, zero: 0 }) {
        return Err(Error::Numerical(format!("Lyapunov solution has inertia {got}, expected ({}, {p}, 0)", n - p)));
    }

    let residual_at = |eps: f64| lmi_residual(a, &pm, lambda, eps);
    let epsilon = if residual_at(1.0) <= 0.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if residual_at(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if epsilon <= 0.0 {
        return Err(Error::Numerical("no positive slack satisfies the inequality".into()));
    }
    Ok(DominanceCertificate {
        residual: residual_at(epsilon),
        p_matrix: pm,
        lambda,
        epsilon,
        p,
    })
}
