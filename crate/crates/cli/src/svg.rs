//! Static SVG rendering of a Nyquist curve with an optional critical disk.

use std::fmt::Write;

use domargin::margins::{Disk, DiskKind};
use domargin::nyquist::NyquistCurve;
use num_complex::Complex64;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const PAD: f64 = 40.0;

struct View {
    x0: f64,
    y0: f64,
    unit: f64,
}

impl View {
    fn fit(points: &[Complex64]) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in points.iter().filter(|p| p.re.is_finite() && p.im.is_finite()) {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        let span_x = (xmax - xmin).max(1e-12);
        let span_y = (ymax - ymin).max(1e-12);
        let unit = ((WIDTH - 2.0 * PAD) / span_x).min((HEIGHT - 2.0 * PAD) / span_y);
        let cx = 0.5 * (xmin + xmax);
        let cy = 0.5 * (ymin + ymax);
        Self { x0: WIDTH / 2.0 - cx * unit, y0: HEIGHT / 2.0 + cy * unit, unit }
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        (self.x0 + z.re * self.unit, self.y0 - z.im * self.unit)
    }

    fn x_at(&self, re: f64) -> f64 {
        (self.x0 + re * self.unit).clamp(-1.0, WIDTH + 1.0)
    }
}

fn closed_curve(curve: &NyquistCurve) -> Vec<Complex64> {
    let mut pts = curve.points.clone();
    pts.push(curve.value_at_infinity);
    pts.extend(curve.points.iter().rev().map(|z| z.conj()));
    pts
}

pub fn render(curve: &NyquistCurve, disk: Option<&Disk>) -> String {
    let pts = closed_curve(curve);
    let mut frame = pts.clone();
    if let Some((c, r)) = disk.and_then(|d| d.circle()) {
        frame.push(Complex64::new(c - r, r));
        frame.push(Complex64::new(c + r, -r));
    }
    if let Some(d) = disk.filter(|d| d.kind() == DiskKind::HalfPlane) {
        let k = if d.k1() != 0.0 { d.k1() } else { d.k2() };
        frame.push(Complex64::new(-1.0 / k, 0.0));
    }
    let view = View::fit(&frame);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(d) = disk {
        let style = r##"fill="#4a7fb5" fill-opacity="0.3" stroke="none""##;
        match (d.kind(), d.circle()) {
            (DiskKind::BoundedDisk, Some((c, r))) => {
                let (cx, cy) = view.px(Complex64::new(c, 0.0));
                let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" {style}/>"#, r * view.unit);
            }
            (DiskKind::ComplementOfDisk, Some((c, r))) => {
                let (cx, cy) = view.px(Complex64::new(c, 0.0));
                let rr = r * view.unit;
                let _ = writeln!(
                    out,
                    r#"<path fill-rule="evenodd" d="M0 0H{WIDTH}V{HEIGHT}H0Z M{:.3} {cy:.3}a{rr:.3} {rr:.3} 0 1 0 {:.3} 0a{rr:.3} {rr:.3} 0 1 0 {:.3} 0Z" {style}/>"#,
                    cx - rr,
                    2.0 * rr,
                    -2.0 * rr
                );
            }
            _ => {
                // Open half-plane to the right of -1/k1 or to the left of -1/k2.
                let (x, right) = if d.k1() != 0.0 { (-1.0 / d.k1(), true) } else { (-1.0 / d.k2(), false) };
                let edge = view.x_at(x);
                let (from, to) = if right { (edge, WIDTH) } else { (0.0, edge) };
                let _ = writeln!(
                    out,
                    r#"<rect x="{from:.3}" y="0" width="{:.3}" height="{HEIGHT}" {style}/>"#,
                    (to - from).max(0.0)
                );
            }
        }
    }
    let (ox, oy) = view.px(Complex64::new(0.0, 0.0));
    let _ = writeln!(out, r##"<line x1="0" y1="{oy:.3}" x2="{WIDTH}" y2="{oy:.3}" stroke="#888" stroke-width="1"/>"##);
    let _ = writeln!(out, r##"<line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{HEIGHT}" stroke="#888" stroke-width="1"/>"##);

    let mut d = String::new();
    for (i, z) in pts.iter().enumerate() {
        let (x, y) = view.px(*z);
        let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
    }
    let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="black" stroke-width="1.5"/>"#);
    out.push_str("</svg>\n");
    out
}
