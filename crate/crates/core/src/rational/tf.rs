use std::fmt;

use num_complex::Complex64;

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// `W(s) = num(s) / den(s)` with a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTransferFunction {
    /// Normalizes the denominator to monic, rescaling the numerator by the same factor.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let lead = den.leading();
        Ok(Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn constant(c: f64) -> Self {
        Self {
            num: Polynomial::constant(c),
            den: Polynomial::constant(1.0),
        }
    }

    /// `1 / (m s^2 + d s + k)`, the mass-spring-damper plant.
    pub fn mass_spring_damper(m: f64, d: f64, k: f64) -> Result<Self> {
        Self::from_coeffs(&[1.0], &[k, d, m])
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    pub fn ensure_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::Improper {
                num: self.num.degree(),
                den: self.den.degree(),
            })
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// `W(j omega)`.
    pub fn freq(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    /// Limit of `W(s)` as `|s| -> inf` for a proper transfer function.
    pub fn feedthrough(&self) -> f64 {
        if !self.num.is_zero() && self.num.degree() == self.den.degree() {
            self.num.leading()
        } else {
            0.0
        }
    }

    /// `W_lambda(s) = W(s - lambda)`.
    pub fn shift(&self, lambda: f64) -> Self {
        let den = self.den.shift(lambda);
        let lead = den.leading();
        Self {
            num: self.num.shift(lambda).scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        }
    }

    /// Product `W1 W2`; no pole-zero cancellation is performed.
    pub fn series(&self, other: &Self) -> Self {
        Self {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    /// `W / (1 + K W)`, the negative-feedback loop with a constant gain.
    pub fn feedback(&self, k: f64) -> Result<Self> {
        let den = &self.den + &self.num.scale(k);
        if den.is_zero() {
            return Err(Error::SingularFeedback);
        }
        Self::new(self.num.clone(), den)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// `W(s) / s`.
    pub fn with_integrator(&self) -> Self {
        Self {
            num: self.num.clone(),
            den: &self.den * &Polynomial::s(),
        }
    }
}

impl fmt::Display for RationalTransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "num {} / den {}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn msd() -> RationalTransferFunction {
        RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap()
    }

    #[test]
    fn shift_of_mass_spring_damper() {
        let w = msd().shift(2.0);
        assert_eq!(w.den().coefficients(), &[-5.0, 1.0, 1.0]);
        assert_eq!(w.num().coefficients(), &[1.0]);
        assert_eq!(msd().shift(0.0), msd());
    }

    #[test]
    fn shift_with_integrator_has_expected_poles() {
        let w = msd().with_integrator().shift(2.0);
        // (s - 2)(s^2 + s - 5) = s^3 - s^2 - 7 s + 10
        assert_eq!(w.den().coefficients(), &[10.0, -7.0, -1.0, 1.0]);
        let mut poles: Vec<f64> = w.den().roots().unwrap().iter().map(|p| p.re).collect();
        poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sq21 = 21f64.sqrt();
        assert_abs_diff_eq!(poles[0], (-1.0 - sq21) / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(poles[1], (-1.0 + sq21) / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(poles[2], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn denominator_normalized_monic() {
        let w = RationalTransferFunction::from_coeffs(&[2.0], &[4.0, 2.0]).unwrap();
        assert_eq!(w.den().coefficients(), &[2.0, 1.0]);
        assert_eq!(w.num().coefficients(), &[1.0]);
        assert_eq!(
            RationalTransferFunction::from_coeffs(&[1.0], &[0.0]),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn series_with_integrator() {
        let integ = RationalTransferFunction::from_coeffs(&[1.0], &[0.0, 1.0]).unwrap();
        let w = msd().series(&integ);
        assert_eq!(w.den().coefficients(), &[0.0, 1.0, 5.0, 1.0]);
        assert_eq!(w, msd().with_integrator());
    }

    #[test]
    fn feedback_algebra() {
        assert_eq!(msd().feedback(0.0).unwrap(), msd());
        let w = RationalTransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
        let cl = w.feedback(1.0).unwrap();
        assert_eq!(cl.den().coefficients(), &[2.0, 1.0]);
        assert_eq!(cl.num().coefficients(), &[1.0]);
        let unit = RationalTransferFunction::constant(-1.0);
        assert_eq!(unit.feedback(1.0), Err(Error::SingularFeedback));
    }

    #[test]
    fn feedthrough_and_properness() {
        let w = RationalTransferFunction::from_coeffs(&[1.0, 3.0], &[2.0, 1.0]).unwrap();
        assert_eq!(w.feedthrough(), 3.0);
        assert!(w.is_proper() && !w.is_strictly_proper());
        assert_eq!(msd().feedthrough(), 0.0);
        let improper = RationalTransferFunction::from_coeffs(&[0.0, 0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(improper.ensure_proper(), Err(Error::Improper { .. })));
    }

    fn small_tf() -> impl Strategy<Value = RationalTransferFunction> {
        (
            prop::collection::vec(-3.0f64..3.0, 1..3),
            prop::collection::vec(-3.0f64..3.0, 2..4),
            0.5f64..2.0,
        )
            .prop_map(|(n, mut d, lead)| {
                d.push(lead);
                RationalTransferFunction::from_coeffs(&n, &d).unwrap()
            })
    }

    proptest! {
        #[test]
        fn shift_commutes_with_series(w1 in small_tf(), w2 in small_tf(), lambda in 0.0f64..3.0) {
            let lhs = w1.series(&w2).shift(lambda);
            let rhs = w1.shift(lambda).series(&w2.shift(lambda));
            for (a, b) in [(lhs.num(), rhs.num()), (lhs.den(), rhs.den())] {
                let scale = 1.0 + b.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
                prop_assert_eq!(a.degree(), b.degree());
                for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
                    prop_assert!((x - y).abs() <= 1e-10 * scale);
                }
            }
        }
    }
}
