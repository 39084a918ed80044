use std::fmt;

use num_complex::Complex64;

use super::disk::{Disk, DiskKind, Region};
use super::disk_margin::MEMBERSHIP_TOL;
use crate::error::{Error, Result};
use crate::format::num;
use crate::nyquist::{clockwise_encirclements, sample_curve, SampleOptions};
use crate::rational::{pole_report, RationalTransferFunction};

/// How the curve condition is read for a sector with `k1 < 0 < k2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignChangeMode {
    /// The curve must lie in `D(k1, k2)`, the complement of the closed disk.
    #[default]
    Literal,
    /// The curve must lie inside the open disk through `-1/k1` and `-1/k2`.
    Classical,
}

impl fmt::Display for SignChangeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignChangeMode::Literal => "literal",
            SignChangeMode::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorCase {
    /// `k1 k2 > 0`: curve outside `D`.
    SameSign,
    /// `k1 k2 < 0`: curve inside `D`.
    SignChange,
    /// `k1 = 0` or `k2 = 0`: curve outside `D`.
    ZeroBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleCriterionReport {
    /// Dominance degree implied by the encirclement condition.
    pub p: Option<i64>,
    pub satisfied: bool,
    /// No pole of `W_lambda` on the imaginary axis.
    pub no_poles_on_axis: bool,
    /// Poles of `W_lambda` in the open right half-plane.
    pub q: Option<usize>,
    /// Clockwise encirclements of `-1/k1` (zero when `k1 = 0`).
    pub encirclements_cw: Option<i64>,
    pub case: SectorCase,
    /// Whether the curve satisfies the disk condition of its case.
    pub curve_condition: bool,
    /// Distance from the curve to the region it must avoid.
    pub min_distance: f64,
    pub mode: SignChangeMode,
    pub k1: f64,
    pub k2: f64,
    pub lambda: f64,
}

impl fmt::Display for CircleCriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<i64>| v.map_or("undefined".to_string(), |x| x.to_string());
        writeln!(f, "sector = [{}, {}]", num(self.k1), num(self.k2))?;
        writeln!(f, "lambda = {}", num(self.lambda))?;
        writeln!(f, "no_poles_on_axis = {}", self.no_poles_on_axis)?;
        writeln!(f, "q = {}", opt(self.q.map(|q| q as i64)))?;
        writeln!(f, "encirclements_cw = {}", opt(self.encirclements_cw))?;
        writeln!(f, "case = {:?}", self.case)?;
        writeln!(f, "curve_condition = {}", self.curve_condition)?;
        writeln!(f, "min_distance = {}", num(self.min_distance))?;
        if self.case == SectorCase::SignChange {
            writeln!(f, "mode = {}", self.mode)?;
        }
        writeln!(f, "p = {}", opt(self.p))?;
        writeln!(f, "satisfied = {}", self.satisfied)
    }
}

/// Circle criterion for p-dominance of the Lure loop `u = -phi(y)` with
/// `phi' in [k1, k2]`. The sector condition itself is checked separately.
pub fn circle_criterion(
    w: &RationalTransferFunction,
    lambda: f64,
    k1: f64,
    k2: f64,
    mode: SignChangeMode,
) -> Result<CircleCriterionReport> {
    let disk = Disk::new(k1, k2)?;
    let case = match disk.kind() {
        DiskKind::BoundedDisk => SectorCase::SameSign,
        DiskKind::ComplementOfDisk => SectorCase::SignChange,
        DiskKind::HalfPlane => SectorCase::ZeroBound,
    };
    let mut report = CircleCriterionReport {
        p: None,
        satisfied: false,
        no_poles_on_axis: false,
        q: None,
        encirclements_cw: None,
        case,
        curve_condition: false,
        min_distance: 0.0,
        mode,
        k1,
        k2,
        lambda,
    };

    let poles = pole_report(w, lambda)?;
    if poles.count_on_line > 0 {
        return Ok(report);
    }
    report.no_poles_on_axis = true;
    report.q = Some(poles.count_right_of_line);
    let curve = sample_curve(w, lambda, &SampleOptions::default())?;

    report.encirclements_cw = if k1 == 0.0 {
        Some(0)
    } else {
        match clockwise_encirclements(&curve, Complex64::new(-1.0 / k1, 0.0)) {
            Ok(n) => Some(n),
            Err(Error::PointOnCurve { .. }) => None,
            Err(e) => return Err(e),
        }
    };
    report.p = report.encirclements_cw.map(|n| poles.count_right_of_line as i64 + n);

    let avoid = match (case, mode) {
        (SectorCase::SignChange, SignChangeMode::Literal) => {
            let (center, radius) = disk.circle().unwrap();
            Region::Ball { center, radius }
        }
        _ => disk.region(),
    };
    let (margin, _) = avoid.curve_margin(&curve);
    report.curve_condition = margin > MEMBERSHIP_TOL * curve.scale;
    report.min_distance = margin.max(0.0);
    report.satisfied = report.curve_condition && matches!(report.p, Some(p) if p >= 0);
    Ok(report)
}
