//! Sampling of the shifted Nyquist curve, winding numbers and real-axis crossings.
//!
//! The sampled arc covers `omega in [0, omega_max]`. The closed curve used for
//! winding numbers is the conjugate mirror of the arc (negative frequencies),
//! the arc itself, and a straight closure through `W_lambda(inf)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::num;
use crate::rational::{pole_report, RationalTransferFunction};

/// Query points closer than this fraction of the curve scale count as on the curve.
pub const ON_CURVE_TOL: f64 = 1e-8;

/// Largest accepted distance of `winding / 2 pi` from an integer.
pub const WINDING_RESIDUE_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    /// Log-spaced frequencies in the initial grid (plus `omega = 0`).
    pub grid_points: usize,
    /// Turning angle (rad) between consecutive chords that triggers bisection.
    pub max_turn: f64,
    /// Chords longer than `scale * max_chord_fraction` are bisected.
    pub max_chord_fraction: f64,
    /// Segments are never split below this relative frequency step.
    pub min_rel_step: f64,
    /// Hard cap on the number of samples.
    pub max_points: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            grid_points: 2000,
            max_turn: 0.05,
            max_chord_fraction: 1.0 / 500.0,
            min_rel_step: 1e-12,
            max_points: 400_000,
        }
    }
}

impl SampleOptions {
    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }
}

/// Ordered samples of `W_lambda(j omega)` for `omega` in `[0, omega_max]`.
#[derive(Debug, Clone)]
pub struct NyquistCurve {
    pub omegas: Vec<f64>,
    pub points: Vec<Complex64>,
    pub value_at_infinity: Complex64,
    /// Largest modulus over the samples and the value at infinity.
    pub scale: f64,
    pub omega_max: f64,
    /// `|value_at_infinity - points.last()|`.
    pub closure_gap: f64,
    pub lambda: f64,
    shifted: RationalTransferFunction,
    options: SampleOptions,
}

impl NyquistCurve {
    /// The shifted transfer function `W_lambda`.
    pub fn shifted(&self) -> &RationalTransferFunction {
        &self.shifted
    }

    pub fn options(&self) -> &SampleOptions {
        &self.options
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        self.shifted.freq(omega)
    }

    fn tol(&self) -> f64 {
        ON_CURVE_TOL * self.scale.max(1e-300)
    }

    /// Whether the sampled arc closed up numerically at `omega_max`.
    pub fn is_closed(&self) -> bool {
        self.closure_gap <= 1e-3 * self.scale.max(1e-12)
    }

    /// Segments of the closed curve in the upper representation: the arc,
    /// then the closure `last -> inf -> conj(last)`. Mirror segments are the
    /// conjugates of the arc segments.
    fn closure_segments(&self) -> [(Complex64, Complex64); 2] {
        let last = *self.points.last().unwrap();
        [
            (last, self.value_at_infinity),
            (self.value_at_infinity, last.conj()),
        ]
    }

    /// Minimum distance from `point` to the closed polygonal curve.
    pub fn distance_to(&self, point: Complex64) -> f64 {
        let conj = point.conj();
        let arc = self
            .points
            .windows(2)
            .map(|s| segment_distance(point, s[0], s[1]).min(segment_distance(conj, s[0], s[1])))
            .fold(f64::INFINITY, f64::min);
        self.closure_segments()
            .iter()
            .map(|&(a, b)| segment_distance(point, a, b))
            .fold(arc, f64::min)
    }

    /// CSV with header `omega,re,im`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,re,im\n");
        for (w, p) in self.omegas.iter().zip(&self.points) {
            out.push_str(&format!("{},{},{}\n", num(*w), num(p.re), num(p.im)));
        }
        out
    }
}

/// Distance from `q` to the segment `[a, b]`.
pub fn segment_distance(q: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = ((q - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (q - (a + ab * t)).norm()
}

/// Samples the Nyquist curve of `W_lambda`.
pub fn sample_curve(
    w: &RationalTransferFunction,
    lambda: f64,
    options: &SampleOptions,
) -> Result<NyquistCurve> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
    }
    let report = pole_report(w, lambda)?;
    if report.count_on_line > 0 {
        return Err(Error::RateOnPole { lambda });
    }
    let shifted = w.shift(lambda);
    let max_pole = report.shifted_poles().map(|p| p.norm()).fold(0.0, f64::max);
    let omega_max = 1e3 * (1.0 + max_pole);

    let mut features: Vec<f64> = report.shifted_poles().map(|p| p.norm()).collect();
    if !shifted.num().is_zero() {
        features.extend(shifted.num().roots()?.iter().map(|z| z.norm()));
    }
    let smallest = features
        .into_iter()
        .filter(|&m| m > 0.0)
        .fold(1.0, f64::min);
    let omega_lo = 1e-4 * smallest;

    let n = options.grid_points.max(2);
    let (log_lo, log_hi) = (omega_lo.ln(), omega_max.ln());
    let mut omegas = Vec::with_capacity(n + 1);
    omegas.push(0.0);
    omegas.extend((0..n).map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).exp()));
    *omegas.last_mut().unwrap() = omega_max;

    let points: Vec<Complex64> = omegas.par_iter().map(|&om| shifted.freq(om)).collect();
    let (omegas, points) = refine(&shifted, omegas, points, options);

    let value_at_infinity = Complex64::new(shifted.feedthrough(), 0.0);
    let scale = points
        .iter()
        .map(|p| p.norm())
        .fold(value_at_infinity.norm(), f64::max);
    let closure_gap = (value_at_infinity - points.last().unwrap()).norm();
    Ok(NyquistCurve {
        omegas,
        points,
        value_at_infinity,
        scale,
        omega_max,
        closure_gap,
        lambda,
        shifted,
        options: options.clone(),
    })
}

/// Bisects segments whose chord is too long or whose neighbouring chords turn too sharply.
fn refine(
    w: &RationalTransferFunction,
    mut omegas: Vec<f64>,
    mut points: Vec<Complex64>,
    opts: &SampleOptions,
) -> (Vec<f64>, Vec<Complex64>) {
    for _pass in 0..64 {
        let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            break;
        }
        let max_chord = scale * opts.max_chord_fraction;
        let tiny = 1e-9 * scale;
        let nseg = points.len() - 1;
        let mut split = vec![false; nseg];
        for k in 0..nseg {
            if (points[k + 1] - points[k]).norm() > max_chord {
                split[k] = true;
            }
        }
        for k in 1..nseg {
            let c1 = points[k] - points[k - 1];
            let c2 = points[k + 1] - points[k];
            if c1.norm() <= tiny || c2.norm() <= tiny {
                continue;
            }
            if (c2 / c1).arg().abs() > opts.max_turn {
                split[k - 1] = true;
                split[k] = true;
            }
        }
        for k in 0..nseg {
            if split[k] && omegas[k + 1] - omegas[k] <= opts.min_rel_step * omegas[k + 1] {
                split[k] = false;
            }
        }
        let n_new = split.iter().filter(|&&s| s).count();
        if n_new == 0 || points.len() + n_new > opts.max_points {
            break;
        }
        let mids: Vec<f64> = (0..nseg)
            .filter(|&k| split[k])
            .map(|k| 0.5 * (omegas[k] + omegas[k + 1]))
            .collect();
        let mid_points: Vec<Complex64> = mids.par_iter().map(|&om| w.freq(om)).collect();
        let mut new_omegas = Vec::with_capacity(omegas.len() + n_new);
        let mut new_points = Vec::with_capacity(omegas.len() + n_new);
        let mut m = 0;
        for k in 0..nseg {
            new_omegas.push(omegas[k]);
            new_points.push(points[k]);
            if split[k] {
                new_omegas.push(mids[m]);
                new_points.push(mid_points[m]);
                m += 1;
            }
        }
        new_omegas.push(omegas[nseg]);
        new_points.push(points[nseg]);
        omegas = new_omegas;
        points = new_points;
    }
    (omegas, points)
}

struct ArcWalk<'a> {
    w: &'a RationalTransferFunction,
    q: Complex64,
    tol: f64,
    min_rel_step: f64,
    min_distance: f64,
}

impl ArcWalk<'_> {
    /// Argument increment of `W(j omega) - q` from `a` to `b`, bisecting while
    /// the chord is not small against the distance to `q`.
    fn increment(&mut self, wa: f64, pa: Complex64, wb: f64, pb: Complex64, depth: u32) -> f64 {
        let da = (pa - self.q).norm();
        let db = (pb - self.q).norm();
        let chord = (pb - pa).norm();
        let can_split = depth < 64 && wb - wa > self.min_rel_step * wb;
        if chord > 0.5 * da.min(db) && can_split {
            let wm = 0.5 * (wa + wb);
            let pm = self.w.freq(wm);
            return self.increment(wa, pa, wm, pm, depth + 1) + self.increment(wm, pm, wb, pb, depth + 1);
        }
        self.min_distance = self.min_distance.min(segment_distance(self.q, pa, pb));
        ((pb - self.q) / (pa - self.q)).arg()
    }
}

fn arc_increment(curve: &NyquistCurve, q: Complex64) -> (f64, f64) {
    let mut walk = ArcWalk {
        w: &curve.shifted,
        q,
        tol: curve.tol(),
        min_rel_step: curve.options.min_rel_step,
        min_distance: f64::INFINITY,
    };
    let mut total = 0.0;
    for k in 0..curve.points.len() - 1 {
        total += walk.increment(
            curve.omegas[k],
            curve.points[k],
            curve.omegas[k + 1],
            curve.points[k + 1],
            0,
        );
        if walk.min_distance <= walk.tol {
            break;
        }
    }
    (total, walk.min_distance)
}

fn winding_once(curve: &NyquistCurve, point: Complex64) -> Result<i64> {
    let tol = curve.tol();
    let on_curve = |distance: f64| Error::PointOnCurve {
        re: point.re,
        im: point.im,
        distance,
    };
    let (arc, d1) = arc_increment(curve, point);
    if d1 <= tol {
        return Err(on_curve(d1));
    }
    // The mirror arc, traversed from -inf to 0, contributes the arc increment about conj(point).
    let (mirror, d2) = arc_increment(curve, point.conj());
    if d2 <= tol {
        return Err(on_curve(d2));
    }
    let mut total = arc + mirror;
    for (a, b) in curve.closure_segments() {
        let d = segment_distance(point, a, b);
        if d <= tol {
            return Err(on_curve(d));
        }
        total += ((b - point) / (a - point)).arg();
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    let residue = (turns - rounded).abs();
    if residue >= WINDING_RESIDUE_TOL {
        return Err(Error::NonIntegerWinding { residue });
    }
    Ok(rounded as i64)
}

/// Counterclockwise winding number of the closed Nyquist curve about `point`.
///
/// The clockwise encirclement count is the negation of the returned value.
/// A non-integer result triggers one retry on a curve resampled with twice the grid density.
pub fn winding_number(curve: &NyquistCurve, point: Complex64) -> Result<i64> {
    match winding_once(curve, point) {
        Err(Error::NonIntegerWinding { .. }) => {
            let opts = curve
                .options
                .clone()
                .with_grid_points(curve.options.grid_points * 2);
            let finer = sample_curve(&curve.shifted, 0.0, &opts)?;
            winding_once(&finer, point)
        }
        other => other,
    }
}

/// Clockwise encirclements of `point`, the count used by the dominance theorems.
pub fn clockwise_encirclements(curve: &NyquistCurve, point: Complex64) -> Result<i64> {
    winding_number(curve, point).map(|w| -w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    Upward,
    Downward,
    /// The curve meets the axis without changing side.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Real value of the curve at the crossing.
    pub value: f64,
    /// Frequency of the crossing on the non-negative arc; `inf` for the value at infinity.
    pub omega: f64,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSet {
    /// Sorted by increasing `value`.
    pub crossings: Vec<Crossing>,
}

impl CrossingSet {
    pub fn values(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| c.value).collect()
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn direction_from(before: f64, after: f64) -> CrossingDirection {
    match (sign(before), sign(after)) {
        (-1, 1) => CrossingDirection::Upward,
        (1, -1) => CrossingDirection::Downward,
        _ => CrossingDirection::Touch,
    }
}

/// Points where the closed curve meets the real axis.
///
/// Always contains the `omega = 0` value and the value at infinity.
pub fn real_axis_crossings(curve: &NyquistCurve) -> CrossingSet {
    let w = &curve.shifted;
    let pts = &curve.points;
    let oms = &curve.omegas;
    let mut out = Vec::new();

    let first_im = pts.get(1).map_or(0.0, |p| p.im);
    out.push(Crossing {
        value: pts[0].re,
        omega: 0.0,
        direction: direction_from(-first_im, first_im),
    });

    for k in 1..pts.len() {
        let (a, b) = (pts[k - 1].im, pts[k].im);
        if b == 0.0 {
            let next = pts.get(k + 1).map_or(-a, |p| p.im);
            out.push(Crossing {
                value: pts[k].re,
                omega: oms[k],
                direction: direction_from(a, next),
            });
        } else if a != 0.0 && sign(a) != sign(b) {
            let (mut lo, mut hi) = (oms[k - 1], oms[k]);
            let sa = sign(a);
            for _ in 0..200 {
                if hi - lo <= 1e-12 * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if sign(w.freq(mid).im) == sa {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let om = 0.5 * (lo + hi);
            out.push(Crossing {
                value: w.freq(om).re,
                omega: om,
                direction: direction_from(a, b),
            });
        }
    }

    let last_im = pts.last().unwrap().im;
    out.push(Crossing {
        value: curve.value_at_infinity.re,
        omega: f64::INFINITY,
        direction: direction_from(last_im, -last_im),
    });

    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    let dedup_tol = 1e-9 * curve.scale;
    let mut merged: Vec<Crossing> = Vec::with_capacity(out.len());
    for c in out {
        match merged.last() {
            Some(prev) if (c.value - prev.value).abs() <= dedup_tol => {}
            _ => merged.push(c),
        }
    }
    CrossingSet { crossings: merged }
}
