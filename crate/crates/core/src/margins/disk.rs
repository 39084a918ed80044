use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nyquist::{segment_distance, NyquistCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskKind {
    /// `k1 k2 > 0`: closed disk with diameter from `-1/k1` to `-1/k2`.
    BoundedDisk,
    /// `k1 k2 < 0`: complement of the closed disk through `-1/k1` and `-1/k2`.
    ComplementOfDisk,
    /// `k1 = 0` or `k2 = 0`: open half-plane.
    HalfPlane,
}

impl fmt::Display for DiskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiskKind::BoundedDisk => "bounded_disk",
            DiskKind::ComplementOfDisk => "complement_of_disk",
            DiskKind::HalfPlane => "half_plane",
        })
    }
}

/// The critical region `D(k1, k2)` in the complex plane.
///
/// For `k1 = 0` the set is the open half-plane `Re(s) < -1/k2`; for `k2 = 0`
/// it is the open half-plane `Re(s) > -1/k1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    k1: f64,
    k2: f64,
}

/// A closed or open region whose boundary is a circle or a vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Region {
    Ball { center: f64, radius: f64 },
    Exterior { center: f64, radius: f64 },
    RightOf(f64),
    LeftOf(f64),
}

impl Region {
    /// Distance from `z` to the region, negative (minus the distance to the
    /// boundary) when `z` lies inside.
    pub(crate) fn signed_distance(&self, z: Complex64) -> f64 {
        match *self {
            Region::Ball { center, radius } => (z - center).norm() - radius,
            Region::Exterior { center, radius } => radius - (z - center).norm(),
            Region::RightOf(x) => x - z.re,
            Region::LeftOf(x) => z.re - x,
        }
    }

    fn segment_signed_distance(&self, a: Complex64, b: Complex64) -> f64 {
        match *self {
            Region::Ball { center, radius } => {
                segment_distance(Complex64::new(center, 0.0), a, b) - radius
            }
            // Convex distance functions attain their extremes at the endpoints.
            _ => self.signed_distance(a).min(self.signed_distance(b)),
        }
    }

    /// Smallest signed distance over the closed curve and the frequency at which it occurs.
    pub(crate) fn curve_margin(&self, curve: &NyquistCurve) -> (f64, f64) {
        // Every region is symmetric about the real axis, so the mirror arc adds nothing.
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..curve.points.len() - 1 {
            let d = self.segment_signed_distance(curve.points[k], curve.points[k + 1]);
            if d < best.0 {
                let om = if self.signed_distance(curve.points[k]) <= self.signed_distance(curve.points[k + 1]) {
                    curve.omegas[k]
                } else {
                    curve.omegas[k + 1]
                };
                best = (d, om);
            }
        }
        let last = *curve.points.last().unwrap();
        let d = self.segment_signed_distance(last, curve.value_at_infinity);
        if d < best.0 {
            best = (d, f64::INFINITY);
        }
        best
    }
}

impl Disk {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 < k2) {
            return Err(Error::InvalidArgument(format!("disk requires k1 < k2, got ({k1}, {k2})")));
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn kind(&self) -> DiskKind {
        let prod = self.k1 * self.k2;
        if prod > 0.0 {
            DiskKind::BoundedDisk
        } else if prod < 0.0 {
            DiskKind::ComplementOfDisk
        } else {
            DiskKind::HalfPlane
        }
    }

    /// Center and radius of the boundary circle, when there is one.
    pub fn circle(&self) -> Option<(f64, f64)> {
        match self.kind() {
            DiskKind::HalfPlane => None,
            _ => {
                let (a, b) = (-1.0 / self.k1, -1.0 / self.k2);
                Some((0.5 * (a + b), 0.5 * (a - b).abs()))
            }
        }
    }

    pub(crate) fn region(&self) -> Region {
        match self.kind() {
            DiskKind::BoundedDisk => {
                let (center, radius) = self.circle().unwrap();
                Region::Ball { center, radius }
            }
            DiskKind::ComplementOfDisk => {
                let (center, radius) = self.circle().unwrap();
                Region::Exterior { center, radius }
            }
            DiskKind::HalfPlane => {
                if self.k1 == 0.0 {
                    Region::LeftOf(-1.0 / self.k2)
                } else {
                    Region::RightOf(-1.0 / self.k1)
                }
            }
        }
    }

    /// Membership of `z` in `D(k1, k2)` (boundary included for the closed disk,
    /// excluded for the complement and the open half-planes).
    pub fn contains(&self, z: Complex64) -> bool {
        match self.region() {
            Region::Ball { .. } => self.region().signed_distance(z) <= 0.0,
            r => r.signed_distance(z) < 0.0,
        }
    }

    /// Distance from `z` to the set, negative inside.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        self.region().signed_distance(z)
    }
}

impl fmt::Display for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({}, {})", self.k1, self.k2)
    }
}
