//! Real polynomials stored in ascending degree order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative residual accepted for a computed root, measured against
/// `sum |c_k| |r|^k`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;

/// A real polynomial; `coefficients()[k]` multiplies `s^k`.
///
/// Trailing (highest-degree) zeros are trimmed on construction, and the zero
/// polynomial is stored as the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    /// Builds `prod (s - r)` from real roots.
    pub fn from_real_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(1.0), |acc, &r| &acc * &Self::new(vec![-r, 1.0]))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect::<Vec<_>>())
    }

    /// Sum of `|c_k| |r|^k`, the natural magnitude against which `|p(r)|` is judged.
    pub fn magnitude_at(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * r + c.abs())
    }

    /// Returns `q` with `q(s) = p(s - lambda)`.
    ///
    /// Repeated synthetic division (Taylor shift); the degree is preserved.
    pub fn shift(&self, lambda: f64) -> Self {
        let a = -lambda;
        let mut c = self.coeffs.clone();
        let n = c.len() - 1;
        if a != 0.0 {
            for i in 0..n {
                for j in (i..n).rev() {
                    c[j] += a * c[j + 1];
                }
            }
        }
        Self::new(c)
    }

    /// All complex roots with multiplicity, from the eigenvalues of the
    /// companion matrix followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        // Factor out roots at the origin exactly.
        let zeros_at_origin = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = &self.coeffs[zeros_at_origin..];
        let m = reduced.len() - 1;
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
        if m == 0 {
            return Ok(roots);
        }
        let lead = reduced[m];
        if m == 1 {
            roots.push(Complex64::new(-reduced[0] / lead, 0.0));
            return Ok(roots);
        }
        let companion = DMatrix::from_fn(m, m, |i, j| {
            if i == 0 {
                -reduced[m - 1 - j] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let reduced_poly = Polynomial::new(reduced.to_vec());
        let eig = companion.complex_eigenvalues();
        roots.extend(eig.iter().map(|&r| reduced_poly.polish_root(r)));
        Ok(roots)
    }

    /// A few Newton steps, kept only while they reduce the residual.
    fn polish_root(&self, mut r: Complex64) -> Complex64 {
        let dp = self.derivative();
        let mut res = self.eval_complex(r).norm();
        for _ in 0..4 {
            let d = dp.eval_complex(r);
            if d.norm() == 0.0 {
                break;
            }
            let candidate = r - self.eval_complex(r) / d;
            let cres = self.eval_complex(candidate).norm();
            if !(cres < res) {
                break;
            }
            r = candidate;
            res = cres;
        }
        if r.im.abs() <= 1e-14 * r.norm() {
            r.im = 0.0;
        }
        r
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c: Vec<f64> = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + rhs.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        Polynomial::new(c)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sorted_re(mut r: Vec<Complex64>) -> Vec<f64> {
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        r.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
        assert!(Polynomial::new(Vec::new()).is_zero());
    }

    #[test]
    fn shift_expands_symbolically() {
        // (s-2)^2 + 5(s-2) + 1 = s^2 + s - 5
        let p = Polynomial::new(vec![1.0, 5.0, 1.0]).shift(2.0);
        assert_eq!(p.coefficients(), &[-5.0, 1.0, 1.0]);
    }

    #[test]
    fn shift_identity_and_constants() {
        let p = Polynomial::new(vec![0.3, -1.0, 2.0, 4.5]);
        assert_eq!(p.shift(0.0), p);
        assert_eq!(Polynomial::constant(7.0).shift(3.3), Polynomial::constant(7.0));
    }

    #[test]
    fn quadratic_roots() {
        let sq21 = 21f64.sqrt();
        let r = sorted_re(Polynomial::new(vec![-5.0, 1.0, 1.0]).roots().unwrap());
        assert_abs_diff_eq!(r[0], (-1.0 - sq21) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], (-1.0 + sq21) / 2.0, epsilon = 1e-12);
        let r = sorted_re(Polynomial::new(vec![1.0, 5.0, 1.0]).roots().unwrap());
        assert_abs_diff_eq!(r[0], (-5.0 - sq21) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], (-5.0 + sq21) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn root_of_s_is_zero() {
        let r = Polynomial::s().roots().unwrap();
        assert_eq!(r, vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert_eq!(Polynomial::zero().roots(), Err(Error::ZeroPolynomial));
        assert!(Polynomial::constant(3.0).roots().unwrap().is_empty());
    }

    #[test]
    fn complex_roots_come_in_pairs() {
        // s^2 + 2s + 5 -> -1 +/- 2j
        let r = Polynomial::new(vec![5.0, 2.0, 1.0]).roots().unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[0].im.abs(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!((r[0] - r[1].conj()).norm(), 0.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn shift_is_a_group_action(
            coeffs in prop::collection::vec(-5.0f64..5.0, 1..6),
            a in 0.0f64..3.0,
            b in 0.0f64..3.0,
        ) {
            let p = Polynomial::new(coeffs);
            let lhs = p.shift(a).shift(b);
            let rhs = p.shift(a + b);
            let scale = 1.0 + rhs.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            for (x, y) in lhs.coefficients().iter().zip(rhs.coefficients()) {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn roots_have_small_residual(coeffs in prop::collection::vec(-10.0f64..10.0, 2..8)) {
            let p = Polynomial::new(coeffs);
            prop_assume!(!p.is_zero() && p.degree() >= 1 && p.leading().abs() > 1e-3);
            let roots = p.roots().unwrap();
            prop_assert_eq!(roots.len(), p.degree());
            for r in roots {
                let res = p.eval_complex(r).norm();
                prop_assert!(res <= ROOT_RESIDUAL_TOL * p.magnitude_at(r.norm()), "residual {res} at {r}");
            }
        }
    }
}
