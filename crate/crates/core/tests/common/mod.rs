#![allow(dead_code)]

use domargin::{Polynomial, RationalTransferFunction};
use num_complex::Complex64;
use rand::Rng;

/// Random proper `W` of degree at most 4 plus a rate that keeps every pole
/// and zero at least `margin` away from the shifted imaginary axis and from each other.
pub fn random_system<R: Rng>(rng: &mut R, margin: f64) -> (RationalTransferFunction, f64) {
    loop {
        let n = rng.gen_range(1..=4usize);
        let mut poles: Vec<Complex64> = Vec::new();
        while poles.len() < n {
            let re = rng.gen_range(-4.0..2.0);
            if poles.len() + 2 <= n && rng.gen_bool(0.4) {
                let im = rng.gen_range(0.2..3.0);
                poles.push(Complex64::new(re, im));
                poles.push(Complex64::new(re, -im));
            } else {
                poles.push(Complex64::new(re, 0.0));
            }
        }
        let m = rng.gen_range(0..n);
        let zeros: Vec<f64> = (0..m).map(|_| rng.gen_range(-4.0..3.0)).collect();
        let lambda = rng.gen_range(0.0..3.0);
        let clear_of_line = poles.iter().all(|p| (p.re + lambda).abs() > margin);
        let no_cancel = zeros.iter().all(|&z| poles.iter().all(|p| (Complex64::new(z, 0.0) - p).norm() > margin));
        let separated = poles
            .iter()
            .enumerate()
            .all(|(i, p)| poles.iter().skip(i + 1).all(|q| (p - q).norm() > margin));
        if !(clear_of_line && no_cancel && separated) {
            continue;
        }
        let gain = rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let den = poly_from_roots(&poles);
        let num = Polynomial::from_real_roots(&zeros).scale(gain);
        return (RationalTransferFunction::new(num, den).unwrap(), lambda);
    }
}

/// Real polynomial with the given (conjugate-closed) roots.
pub fn poly_from_roots(roots: &[Complex64]) -> Polynomial {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    Polynomial::new(c.iter().map(|z| z.re).collect::<Vec<f64>>())
}

/// Roots of `den + k num` right of `-lambda`, or `None` if one sits within `tol` of the line.
pub fn closed_loop_degree(w: &RationalTransferFunction, k: f64, lambda: f64, tol: f64) -> Option<usize> {
    let char_poly = w.den() + &w.num().scale(k);
    let roots = char_poly.roots().ok()?;
    if roots.iter().any(|r| (r.re + lambda).abs() < tol) {
        return None;
    }
    Some(roots.iter().filter(|r| r.re + lambda > 0.0).count())
}
