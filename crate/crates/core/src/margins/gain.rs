use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::num;
use crate::nyquist::{real_axis_crossings, sample_curve, winding_number, NyquistCurve, SampleOptions};
use crate::rational::{pole_report, RationalTransferFunction};

/// Number of poles of `W_lambda` in the open right half-plane.
pub fn open_loop_degree(w: &RationalTransferFunction, lambda: f64) -> Result<usize> {
    let r = pole_report(w, lambda)?;
    if r.count_on_line > 0 {
        return Err(Error::RateOnPole { lambda });
    }
    Ok(r.count_right_of_line)
}

/// An open gain interval on which the closed loop is strictly `p2`-dominant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainInterval {
    pub lo: f64,
    pub hi: f64,
    pub p2: i64,
}

impl GainInterval {
    pub fn contains(&self, k: f64) -> bool {
        self.lo < k && k < self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainMarginReport {
    /// Disjoint, sorted by `lo`.
    pub intervals: Vec<GainInterval>,
    pub lambda: f64,
    pub p1: usize,
    /// Finite gains `K` for which the curve passes through `-1/K`.
    pub critical_gains: Vec<f64>,
}

impl GainMarginReport {
    pub fn interval_containing(&self, k: f64) -> Option<&GainInterval> {
        self.intervals.iter().find(|i| i.contains(k))
    }

    pub fn p2_at(&self, k: f64) -> Option<i64> {
        self.interval_containing(k).map(|i| i.p2)
    }

    /// CSV with header `k_lo,k_hi,p2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_lo,k_hi,p2\n");
        for i in &self.intervals {
            out.push_str(&format!("{},{},{}\n", num(i.lo), num(i.hi), i.p2));
        }
        out
    }
}

impl fmt::Display for GainMarginReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda = {}", num(self.lambda))?;
        writeln!(f, "p1 = {}", self.p1)?;
        for i in &self.intervals {
            writeln!(f, "({},{})->p={}", num(i.lo), num(i.hi), i.p2)?;
        }
        Ok(())
    }
}

/// `K = -1/c`, with the one-sided limits at `c = 0` and `c = +-inf` chosen by `side`.
fn critical_to_gain(c: f64, from_above: bool) -> f64 {
    if c == 0.0 {
        if from_above {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else if c.is_infinite() {
        0.0
    } else {
        -1.0 / c
    }
}

/// Gain margins with rate `lambda`, from the real-axis crossings of the shifted curve.
pub fn gain_margins(w: &RationalTransferFunction, lambda: f64) -> Result<GainMarginReport> {
    let curve = sample_curve(w, lambda, &SampleOptions::default())?;
    gain_margins_on(&curve, open_loop_degree(w, lambda)?)
}

pub(crate) fn gain_margins_on(curve: &NyquistCurve, p1: usize) -> Result<GainMarginReport> {
    let crossings = real_axis_crossings(curve);
    let mut breaks = crossings.values();
    let critical_gains: Vec<f64> = breaks.iter().filter(|&&c| c != 0.0).map(|&c| -1.0 / c).collect();
    if !breaks.contains(&0.0) {
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
    }

    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(f64::NEG_INFINITY);
    edges.extend(breaks);
    edges.push(f64::INFINITY);

    let mut intervals = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let rep = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (false, true) => b - b.abs().max(1.0),
            (true, false) => a + a.abs().max(1.0),
            (false, false) => 0.0,
        };
        let p2 = match winding_number(curve, Complex64::new(rep, 0.0)) {
            Ok(w) => p1 as i64 - w,
            // The curve runs along the real axis here; every gain in the range is critical.
            Err(Error::PointOnCurve { .. }) => continue,
            Err(e) => return Err(e),
        };
        // K = -1/c is increasing on each side of c = 0.
        let lo = if a.is_infinite() { 0.0 } else { critical_to_gain(a, true) };
        let hi = if b.is_infinite() { 0.0 } else { critical_to_gain(b, false) };
        intervals.push(GainInterval { lo, hi, p2 });
    }
    intervals.sort_by(|x, y| x.lo.total_cmp(&y.lo));

    // K = 0 is never critical: join the pieces on either side of it.
    let mut merged: Vec<GainInterval> = Vec::with_capacity(intervals.len());
    for i in intervals {
        match merged.last_mut() {
            Some(prev) if prev.hi == 0.0 && i.lo == 0.0 && prev.p2 == i.p2 => prev.hi = i.hi,
            _ => merged.push(i),
        }
    }

    Ok(GainMarginReport {
        intervals: merged,
        lambda: curve.lambda,
        p1,
        critical_gains,
    })
}
