use std::fmt;

use num_complex::Complex64;

use super::disk::{Disk, DiskKind};
use super::gain::open_loop_degree;
use crate::error::{Error, Result};
use crate::format::num;
use crate::nyquist::{clockwise_encirclements, sample_curve, NyquistCurve, SampleOptions};
use crate::rational::RationalTransferFunction;

/// Points within this fraction of the curve scale from the boundary count as intersecting.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskMarginReport {
    pub holds: bool,
    /// Distance from the curve to `D`; zero when the curve meets `D`.
    pub min_distance: f64,
    /// Frequency where the curve comes closest to `D` (`inf` for the closure).
    pub omega_at_min: f64,
    /// Clockwise encirclements of `D`; `None` when the curve crosses a bounded disk.
    pub encirclements_cw: Option<i64>,
    pub p1: usize,
    pub p2_target: i64,
    /// `p1 + encirclements_cw`.
    pub p2: Option<i64>,
    pub disk: Disk,
    pub lambda: f64,
}

impl DiskMarginReport {
    /// CSV with header `holds,min_distance,encirclements_cw,p1,p2`.
    pub fn to_csv(&self) -> String {
        format!(
            "holds,min_distance,encirclements_cw,p1,p2\n{},{},{},{},{}\n",
            self.holds,
            num(self.min_distance),
            self.encirclements_cw.map_or(String::new(), |e| e.to_string()),
            self.p1,
            self.p2.map_or(String::new(), |p| p.to_string()),
        )
    }
}

impl fmt::Display for DiskMarginReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "disk = {} ({})", self.disk, self.disk.kind())?;
        writeln!(f, "lambda = {}", num(self.lambda))?;
        writeln!(f, "holds = {}", self.holds)?;
        writeln!(f, "min_distance = {}", num(self.min_distance))?;
        writeln!(f, "omega_at_min = {}", num(self.omega_at_min))?;
        match self.encirclements_cw {
            Some(e) => writeln!(f, "encirclements_cw = {e}")?,
            None => writeln!(f, "encirclements_cw = undefined")?,
        }
        writeln!(f, "p1 = {}", self.p1)?;
        writeln!(f, "p2_target = {}", self.p2_target)?;
        match self.p2 {
            Some(p) => writeln!(f, "p2 = {p}"),
            None => writeln!(f, "p2 = undefined"),
        }
    }
}

/// Smallest distance from the curve to `D` (zero if they meet) and where it occurs.
pub(crate) fn distance_to_disk(curve: &NyquistCurve, disk: &Disk) -> (f64, f64, bool) {
    let (margin, omega) = disk.region().curve_margin(curve);
    let intersects = margin <= MEMBERSHIP_TOL * curve.scale;
    (if intersects { 0.0 } else { margin }, omega, intersects)
}

/// Checks whether `D(k1, k2)` is a `p2`-disk margin of `W` with rate `lambda`.
pub fn disk_margin_check(w: &RationalTransferFunction, lambda: f64, disk: &Disk, p2: i64) -> Result<DiskMarginReport> {
    let p1 = open_loop_degree(w, lambda)?;
    let curve = sample_curve(w, lambda, &SampleOptions::default())?;
    let (min_distance, omega_at_min, intersects) = distance_to_disk(&curve, disk);

    let encirclements_cw = match disk.kind() {
        DiskKind::BoundedDisk => {
            let (center, _) = disk.circle().unwrap();
            match clockwise_encirclements(&curve, Complex64::new(center, 0.0)) {
                Ok(n) if !intersects => Some(n),
                Ok(_) | Err(Error::PointOnCurve { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        // A bounded curve winds zero times around any point of an unbounded set.
        DiskKind::ComplementOfDisk | DiskKind::HalfPlane => Some(0),
    };
    let holds = !intersects && encirclements_cw == Some(p2 - p1 as i64);
    Ok(DiskMarginReport {
        holds,
        min_distance,
        omega_at_min,
        encirclements_cw,
        p1,
        p2_target: p2,
        p2: encirclements_cw.map(|e| p1 as i64 + e),
        disk: *disk,
        lambda,
    })
}
