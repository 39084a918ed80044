use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::gain::open_loop_degree;
use crate::error::{Error, Result};
use crate::format::num;
use crate::nyquist::{sample_curve, winding_number, NyquistCurve, SampleOptions};
use crate::rational::RationalTransferFunction;

/// An open rotation interval; an interval with `hi == PI` also contains `PI`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PhaseInterval {
    pub fn contains(&self, phi: f64) -> bool {
        let phi = wrap(phi);
        self.lo < phi && (phi < self.hi || (self.hi == PI && phi == PI))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMarginReport {
    pub intervals: Vec<PhaseInterval>,
    pub k: f64,
    pub p2: i64,
    pub p1: usize,
    pub lambda: f64,
    /// Rotation angles at which the rotated curve passes through `-1/K`.
    pub events: Vec<f64>,
}

impl PhaseMarginReport {
    pub fn contains(&self, phi: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(phi))
    }

    /// CSV with header `phi_lo,phi_hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi_lo,phi_hi\n");
        for i in &self.intervals {
            out.push_str(&format!("{},{}\n", num(i.lo), num(i.hi)));
        }
        out
    }
}

impl fmt::Display for PhaseMarginReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda = {}", num(self.lambda))?;
        writeln!(f, "k = {}", num(self.k))?;
        writeln!(f, "p1 = {}", self.p1)?;
        writeln!(f, "p2 = {}", self.p2)?;
        if self.intervals.is_empty() {
            writeln!(f, "empty")?;
        }
        for i in &self.intervals {
            let close = if i.hi == PI { "]" } else { ")" };
            writeln!(f, "({},{}{}", num(i.lo), num(i.hi), close)?;
        }
        Ok(())
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

fn bisect_modulus(curve: &NyquistCurve, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = |om: f64| curve.eval(om).norm() - target;
    let lo_sign = g(lo) > 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Frequencies on the sampled arc where `|W_lambda(j omega)| = target`.
fn modulus_crossings(curve: &NyquistCurve, target: f64) -> Vec<f64> {
    let g: Vec<f64> = curve.points.iter().map(|p| p.norm() - target).collect();
    let mut out = Vec::new();
    for k in 0..g.len() {
        if g[k] == 0.0 {
            out.push(curve.omegas[k]);
        } else if k > 0 && g[k - 1] != 0.0 && (g[k - 1] > 0.0) != (g[k] > 0.0) {
            out.push(bisect_modulus(curve, target, curve.omegas[k - 1], curve.omegas[k]));
        }
    }
    out
}

/// Rotations `phi` in `(-pi, pi]` for which `e^{j phi} W_lambda` encircles `-1/K`
/// clockwise `p2 - p1` times.
pub fn phase_margins(w: &RationalTransferFunction, lambda: f64, k: f64, p2: i64) -> Result<PhaseMarginReport> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("phase margin requires a finite nonzero gain, got {k}")));
    }
    let p1 = open_loop_degree(w, lambda)?;
    let curve = sample_curve(w, lambda, &SampleOptions::default())?;
    let critical = Complex64::new(-1.0 / k, 0.0);
    let target = 1.0 / k.abs();
    let base = critical.arg();

    let mut events = Vec::new();
    for om in modulus_crossings(&curve, target) {
        let theta = curve.eval(om).arg();
        events.push(wrap(base - theta));
        events.push(wrap(base + theta));
    }
    let v_inf = curve.value_at_infinity;
    if (v_inf.norm() - target).abs() <= 1e-12 * target {
        events.push(wrap(base - v_inf.arg()));
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let wanted = p2 - p1 as i64;
    // Rotating the curve by phi is the same as rotating the point by -phi.
    let count_at = |phi: f64| -> Result<Option<i64>> {
        let q = critical * Complex64::from_polar(1.0, -phi);
        match winding_number(&curve, q) {
            Ok(wn) => Ok(Some(-wn)),
            Err(Error::PointOnCurve { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut intervals = Vec::new();
    if events.is_empty() {
        if count_at(0.0)? == Some(wanted) {
            intervals.push(PhaseInterval { lo: -PI, hi: PI });
        }
    } else {
        let m = events.len();
        for i in 0..m {
            let lo = events[i];
            let hi = if i + 1 < m { events[i + 1] } else { events[0] + 2.0 * PI };
            if hi - lo <= 0.0 {
                continue;
            }
            if count_at(wrap(0.5 * (lo + hi)))? != Some(wanted) {
                continue;
            }
            if hi <= PI {
                intervals.push(PhaseInterval { lo, hi });
            } else {
                // The arc wraps through pi.
                if lo < PI {
                    intervals.push(PhaseInterval { lo, hi: PI });
                }
                let rest = hi - 2.0 * PI;
                if rest > -PI {
                    intervals.push(PhaseInterval { lo: -PI, hi: rest });
                }
            }
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    }

    Ok(PhaseMarginReport {
        intervals,
        k,
        p2,
        p1,
        lambda,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msd() -> RationalTransferFunction {
        RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap()
    }

    /// Independent event angle: |W_lambda(j w)| = 1/6 for W_lambda = 1/(s^2 + s - 5)
    /// gives w^2 = (-11 + sqrt(165))/2, and phi = pi - atan(w / (w^2 + 5)).
    fn k6_event() -> f64 {
        let w2 = (-11.0 + 165f64.sqrt()) / 2.0;
        (w2.sqrt() / (w2 + 5.0)).atan()
    }

    #[test]
    fn full_margin_when_curve_cannot_reach_point() {
        let r = phase_margins(&msd(), 2.0, 2.0, 1).unwrap();
        assert!(r.events.is_empty());
        assert_eq!(r.intervals, vec![PhaseInterval { lo: -PI, hi: PI }]);
        assert!(r.contains(PI));
        assert!(r.contains(-3.0));
    }

    #[test]
    fn empty_when_base_count_differs() {
        let r = phase_margins(&msd(), 2.0, 2.0, 0).unwrap();
        assert!(r.intervals.is_empty());
    }

    #[test]
    fn gain_six_interval_matches_event_oracle() {
        let expected = k6_event();
        assert!((expected - 0.1608).abs() < 1e-3);
        let r = phase_margins(&msd(), 2.0, 6.0, 0).unwrap();
        assert_eq!(r.intervals.len(), 1, "{r}");
        assert!((r.intervals[0].lo + expected).abs() < 1e-9);
        assert!((r.intervals[0].hi - expected).abs() < 1e-9);
        assert!(r.contains(0.0));
    }

    #[test]
    fn complement_is_reported_for_the_other_degree() {
        let expected = k6_event();
        let r = phase_margins(&msd(), 2.0, 6.0, 1).unwrap();
        assert_eq!(r.intervals.len(), 2, "{r}");
        assert!((r.intervals[0].lo + PI).abs() < 1e-15);
        assert!((r.intervals[0].hi + expected).abs() < 1e-9);
        assert!((r.intervals[1].lo - expected).abs() < 1e-9);
        assert_eq!(r.intervals[1].hi, PI);
        assert!(r.contains(PI) && !r.contains(0.0));
    }

    #[test]
    fn zero_gain_rejected() {
        assert!(matches!(phase_margins(&msd(), 2.0, 0.0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unrotated_match_contains_zero() {
        let w = msd().with_integrator();
        for k in [-20.0, -3.0, 0.5, 4.0, 30.0] {
            let p1 = open_loop_degree(&w, 2.0).unwrap() as i64;
            let curve = sample_curve(&w, 2.0, &SampleOptions::default()).unwrap();
            let Ok(wn) = winding_number(&curve, Complex64::new(-1.0 / k, 0.0)) else {
                continue;
            };
            let r = phase_margins(&w, 2.0, k, p1 - wn).unwrap();
            assert!(r.contains(0.0), "k = {k}: {r}");
        }
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
