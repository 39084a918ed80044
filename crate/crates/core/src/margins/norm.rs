use crate::error::Result;
use crate::nyquist::{sample_curve, SampleOptions};
use crate::rational::RationalTransferFunction;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[a, b]` by golden-section search to relative tolerance `rel_tol`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f(a).max(f(b)).max(f1).max(f2);
    for _ in 0..200 {
        if b - a <= rel_tol * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// `sup_omega |W(j omega - lambda)|`, the H-infinity norm of the shifted transfer function.
pub fn hinf_lambda_norm(w: &RationalTransferFunction, lambda: f64) -> Result<f64> {
    let curve = sample_curve(w, lambda, &SampleOptions::default())?;
    let mags: Vec<f64> = curve.points.iter().map(|p| p.norm()).collect();
    let n = mags.len();
    let mut best = mags
        .iter()
        .copied()
        .fold(curve.value_at_infinity.norm(), f64::max);
    let modulus = |om: f64| curve.eval(om).norm();
    for k in 0..n {
        let left = if k > 0 { mags[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < n { mags[k + 1] } else { f64::NEG_INFINITY };
        if mags[k] >= left && mags[k] >= right {
            let a = curve.omegas[k.saturating_sub(1)];
            let b = curve.omegas[(k + 1).min(n - 1)];
            if b > a {
                best = best.max(golden_max(modulus, a, b, 1e-10));
            }
        }
    }
    Ok(best)
}
