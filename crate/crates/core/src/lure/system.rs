use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::nonlinearity::StaticNonlinearity;
use crate::error::{Error, Result};
use crate::format::num;
use crate::rational::{RationalTransferFunction, StateSpace};

/// Negative feedback interconnection `x' = A x + B u`, `y = C x`, `u = -phi(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LureSystem {
    linear: StateSpace,
    nonlinearity: StaticNonlinearity,
}

impl LureSystem {
    pub fn new(linear: StateSpace, nonlinearity: StaticNonlinearity) -> Result<Self> {
        if linear.d != 0.0 {
            return Err(Error::InvalidArgument("linear block must be strictly proper (D = 0)".into()));
        }
        if linear.order() == 0 {
            return Err(Error::Dimension("linear block has no state".into()));
        }
        Ok(Self { linear, nonlinearity })
    }

    pub fn from_tf(w: &RationalTransferFunction, nonlinearity: StaticNonlinearity) -> Result<Self> {
        Self::new(StateSpace::from_tf(w)?, nonlinearity)
    }

    pub fn linear(&self) -> &StateSpace {
        &self.linear
    }

    pub fn nonlinearity(&self) -> StaticNonlinearity {
        self.nonlinearity
    }

    pub fn order(&self) -> usize {
        self.linear.order()
    }

    pub fn output(&self, x: &[f64]) -> f64 {
        self.linear.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Jacobian `A - B phi'(y) C` of the closed loop at a state with output `y`.
    pub fn jacobian(&self, y: f64) -> DMatrix<f64> {
        self.linear.closed_loop_a(self.nonlinearity.derivative(y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub state: DVector<f64>,
    pub output: f64,
    pub stability: Stability,
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    /// Ordered by output.
    pub points: Vec<Equilibrium>,
    /// Set when the scan hints at roots outside the window.
    pub boundary_warning: bool,
}

impl fmt::Display for EquilibriumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.points {
            writeln!(f, "y* = {} ({})", num(e.output), e.stability)?;
        }
        if self.boundary_warning {
            writeln!(f, "warning: equilibria may exist outside the scan window")?;
        }
        Ok(())
    }
}

/// Scan window for equilibrium outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumScan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for EquilibriumScan {
    fn default() -> Self {
        Self { lo: -100.0, hi: 100.0, points: 10_001 }
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change roots of `f` on the scan grid, plus a flag for roots near or beyond the ends.
fn scan_roots(f: &dyn Fn(f64) -> f64, scan: &EquilibriumScan) -> Result<(Vec<f64>, bool)> {
    if !(scan.lo < scan.hi) || scan.points < 2 {
        return Err(Error::InvalidArgument("equilibrium scan window is empty".into()));
    }
    let step = (scan.hi - scan.lo) / (scan.points - 1) as f64;
    let ys: Vec<f64> = (0..scan.points).map(|i| scan.lo + step * i as f64).collect();
    let fs: Vec<f64> = ys.iter().map(|&y| f(y)).collect();
    if fs.iter().all(|&v| v == 0.0) {
        return Err(Error::Numerical("equilibria form a continuum".into()));
    }
    let mut roots = Vec::new();
    for i in 0..ys.len() {
        if fs[i] == 0.0 {
            roots.push(ys[i]);
        } else if i + 1 < ys.len() && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0) {
            roots.push(bisect(f, ys[i], ys[i + 1]));
        }
    }
    let near_edge = roots.iter().any(|&r| r - scan.lo <= step || scan.hi - r <= step);
    Ok((roots, near_edge))
}

/// Equilibria of the loop, found from the scalar output equation.
///
/// With invertible `A` the outputs solve `y + W(0) phi(y) = 0` and the state is
/// `A^-1 B phi(y)`. With singular `A` (an integrator in the loop) they solve
/// `phi(y) = 0` and the state lies on the kernel of `A`.
pub fn equilibria(sys: &LureSystem, scan: &EquilibriumScan) -> Result<EquilibriumSet> {
    let lin = sys.linear();
    let nl = sys.nonlinearity();
    let svd = lin.a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let (imin, smin) = svd.singular_values.argmin();
    let singular = smin <= 1e-12 * smax.max(1.0);

    let mut points = Vec::new();
    let warning;
    if !singular {
        let ainv_b = lin
            .a
            .clone()
            .lu()
            .solve(&lin.b)
            .ok_or_else(|| Error::Numerical("state matrix is singular".into()))?;
        let w0 = -(&lin.c * &ainv_b)[(0, 0)];
        let f = |y: f64| y + w0 * nl.eval(y);
        let (roots, near_edge) = scan_roots(&f, scan)?;
        // Asymptotically f behaves like y unless the gain term dominates.
        warning = near_edge || f(scan.lo) > 0.0 || f(scan.hi) < 0.0;
        for y in roots {
            points.push((&ainv_b * nl.eval(y), y));
        }
    } else {
        if svd.singular_values.iter().filter(|&&s| s <= 1e-12 * smax.max(1.0)).count() > 1 {
            return Err(Error::Numerical("state matrix has a repeated kernel".into()));
        }
        // B in the range of A would leave the equilibrium set non-isolated.
        let ls = svd.solve(&lin.b, 1e-12 * smax.max(1.0)).map_err(|e| Error::Numerical(e.into()))?;
        if (&lin.a * &ls - &lin.b).norm() <= 1e-9 * lin.b.norm().max(1.0) {
            return Err(Error::Numerical("equilibria form a continuum".into()));
        }
        let v_t = svd.v_t.as_ref().expect("requested");
        let v: DVector<f64> = v_t.row(imin).transpose();
        let cv = (&lin.c * &v)[(0, 0)];
        if cv.abs() <= 1e-12 * v.norm() {
            return Err(Error::Numerical("kernel of the state matrix is unobservable".into()));
        }
        let f = |y: f64| nl.eval(y);
        let (roots, near_edge) = scan_roots(&f, scan)?;
        warning = near_edge;
        for y in roots {
            points.push((&v * (y / cv), y));
        }
    }

    let points = points
        .into_iter()
        .map(|(state, output)| {
            let eigenvalues: Vec<Complex64> = sys.jacobian(output).complex_eigenvalues().iter().copied().collect();
            let stability =
                if eigenvalues.iter().all(|e| e.re < 0.0) { Stability::Stable } else { Stability::Unstable };
            Equilibrium { state, output, stability, eigenvalues }
        })
        .collect();
    Ok(EquilibriumSet { points, boundary_warning: warning })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msd(nl: StaticNonlinearity) -> LureSystem {
        LureSystem::from_tf(&RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap(), nl).unwrap()
    }

    #[test]
    fn bistable_equilibria() {
        let set = equilibria(&msd(StaticNonlinearity::ScaledTanh(-2.0)), &EquilibriumScan::default()).unwrap();
        assert!(!set.boundary_warning);
        let ys: Vec<f64> = set.points.iter().map(|e| e.output).collect();
        assert_eq!(ys.len(), 3);
        assert!((ys[0] + 1.915_008_2).abs() < 1e-6);
        assert!(ys[1].abs() < 1e-12);
        assert!((ys[2] - 1.915_008_2).abs() < 1e-6);
        let stab: Vec<Stability> = set.points.iter().map(|e| e.stability).collect();
        assert_eq!(stab, [Stability::Stable, Stability::Unstable, Stability::Stable]);
        // Residual of the fixed-point equation y = 2 tanh y.
        assert!((ys[2] - 2.0 * ys[2].tanh()).abs() < 1e-11);
        // Output of the reconstructed state.
        assert!((set.points[2].state[0] - ys[2]).abs() < 1e-12);
    }

    #[test]
    fn weak_gain_single_equilibrium() {
        let set = equilibria(&msd(StaticNonlinearity::ScaledTanh(-0.5)), &EquilibriumScan::default()).unwrap();
        assert_eq!(set.points.len(), 1);
        assert_eq!(set.points[0].output, 0.0);
        assert_eq!(set.points[0].stability, Stability::Stable);
    }

    #[test]
    fn integrator_loop() {
        let w = RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap().with_integrator();
        let sys = LureSystem::from_tf(&w, StaticNonlinearity::ScaledTanh(-5.0)).unwrap();
        let set = equilibria(&sys, &EquilibriumScan::default()).unwrap();
        assert_eq!(set.points.len(), 1);
        assert_eq!(set.points[0].output, 0.0);
        assert_eq!(set.points[0].stability, Stability::Unstable);
        assert!(set.points[0].state.norm() < 1e-15);
    }

    #[test]
    fn rejects_feedthrough() {
        let w = RationalTransferFunction::from_coeffs(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(LureSystem::from_tf(&w, StaticNonlinearity::Linear(1.0)).is_err());
    }

    #[test]
    fn continuum_is_reported() {
        // W(0) = 1 with phi(y) = -y makes every output an equilibrium.
        let sys = msd(StaticNonlinearity::Linear(-1.0));
        assert!(equilibria(&sys, &EquilibriumScan::default()).is_err());
    }

    #[test]
    fn roots_beyond_window_are_flagged() {
        let scan = EquilibriumScan { lo: -1.0, hi: 1.0, points: 101 };
        let set = equilibria(&msd(StaticNonlinearity::ScaledTanh(-2.0)), &scan).unwrap();
        assert!(set.boundary_warning);
        assert_eq!(set.points.len(), 1);
    }
}
