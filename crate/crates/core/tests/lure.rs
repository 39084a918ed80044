use domargin::lure::{
    classify, equilibria, simulate, AttractorKind, EquilibriumScan, LureSystem, SimOptions, Stability,
    StaticNonlinearity,
};
use domargin::margins::{circle_criterion, SignChangeMode};
use domargin::RationalTransferFunction;
use nalgebra::DVector;
use proptest::prelude::*;
use rayon::prelude::*;

fn msd() -> RationalTransferFunction {
    RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap()
}

fn bistable() -> LureSystem {
    LureSystem::from_tf(&msd(), StaticNonlinearity::ScaledTanh(-2.0)).unwrap()
}

fn integral_loop(gain: f64) -> LureSystem {
    LureSystem::from_tf(&msd().with_integrator(), StaticNonlinearity::ScaledTanh(gain)).unwrap()
}

fn ic_grid(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for a in [-3.0, -1.5, -0.2, 0.7, 2.5] {
        for b in [-1.0, -0.3, 0.4, 1.2] {
            let mut x = vec![a, b];
            x.resize(n, 0.5 * a);
            out.push(x);
        }
    }
    out
}

#[test]
fn odd_nonlinearity_gives_mirrored_trajectories() {
    for (sys, x0) in [(bistable(), vec![0.3, -0.2]), (integral_loop(8.0), vec![0.3, -0.2, 0.1])] {
        let neg: Vec<f64> = x0.iter().map(|v| -v).collect();
        let a = simulate(&sys, &x0, &SimOptions::default()).unwrap();
        let b = simulate(&sys, &neg, &SimOptions::default()).unwrap();
        let worst = a.states.iter().zip(&b.states).map(|(p, q)| (p + q).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "asymmetry {worst:e}");
    }
}

#[test]
fn step_halving_changes_final_state_little() {
    let cases = [(bistable(), vec![0.1, 0.0]), (integral_loop(-5.0), vec![0.1, 0.0, 0.0])];
    for (sys, x0) in cases {
        let coarse = simulate(&sys, &x0, &SimOptions::default()).unwrap();
        let fine = simulate(&sys, &x0, &SimOptions { dt: 5e-4, ..SimOptions::default() }).unwrap();
        let diff = coarse
            .final_state()
            .iter()
            .zip(fine.final_state())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "final state moved by {diff:e}");
    }
}

#[test]
fn one_dominant_loop_settles() {
    let sys = bistable();
    let cc = circle_criterion(&msd(), 2.0, -2.0, 0.0, SignChangeMode::Literal).unwrap();
    assert!(cc.satisfied && cc.p == Some(1));
    let verdicts: Vec<AttractorKind> = ic_grid(2)
        .par_iter()
        .map(|x0| classify(&simulate(&sys, x0, &SimOptions::with_horizon(200.0)).unwrap()).kind)
        .collect();
    for v in verdicts {
        assert!(matches!(v, AttractorKind::Equilibrium(_) | AttractorKind::Undetermined), "{v:?}");
    }
}

// The negative-slope integral loop is also two-dominant but its trajectories
// are unbounded, where the dichotomy says nothing; the positive slope keeps them bounded.
#[test]
fn two_dominant_loop_settles_or_oscillates() {
    let sys = integral_loop(8.0);
    let cc = circle_criterion(&msd().with_integrator(), 2.0, 0.0, 8.0, SignChangeMode::Literal).unwrap();
    assert!(cc.satisfied && cc.p == Some(2), "{cc}");
    let verdicts: Vec<AttractorKind> = ic_grid(3)
        .par_iter()
        .map(|x0| classify(&simulate(&sys, x0, &SimOptions::with_horizon(200.0)).unwrap()).kind)
        .collect();
    let mut periods = Vec::new();
    for v in verdicts {
        match v {
            AttractorKind::LimitCycle { period, .. } => periods.push(period),
            AttractorKind::Equilibrium(_) => {}
            other => panic!("{other:?}"),
        }
    }
    // Reference period 6.336 from an independent adaptive integration.
    assert!(!periods.is_empty());
    for p in periods {
        assert!((p - 6.336).abs() < 0.02, "period {p}");
    }
}

#[test]
fn literal_integral_loop_drifts() {
    let sys = integral_loop(-5.0);
    let eq = equilibria(&sys, &EquilibriumScan::default()).unwrap();
    assert_eq!(eq.points.len(), 1);
    assert_eq!(eq.points[0].stability, Stability::Unstable);
    let trace = simulate(&sys, &[0.1, 0.0, 0.0], &SimOptions::default()).unwrap();
    // Saturated positive feedback drives the integrator at the rate 5.
    let y = &trace.outputs;
    let slope = (y[y.len() - 1] - y[y.len() - 1001]) / 1.0;
    assert!((slope - 5.0).abs() < 1e-3, "slope {slope}");
}

#[test]
fn stable_equilibria_are_reached() {
    for sys in [bistable(), LureSystem::from_tf(&msd(), StaticNonlinearity::ScaledTanh(-0.5)).unwrap()] {
        let set = equilibria(&sys, &EquilibriumScan::default()).unwrap();
        for e in set.points.iter().filter(|e| e.stability == Stability::Stable) {
            let jac = sys.jacobian(e.output);
            let eig = jac.clone().eigen_decomposition_real();
            let x0 = &e.state + eig * 1e-2;
            let trace = simulate(&sys, x0.as_slice(), &SimOptions::with_horizon(200.0)).unwrap();
            let end = DVector::from_column_slice(trace.final_state());
            assert!((end - &e.state).norm() < 1e-6, "not reached: y* = {}", e.output);
        }
    }
}

/// Unit eigenvector of the slowest stable real mode.
trait SlowDirection {
    fn eigen_decomposition_real(self) -> DVector<f64>;
}

impl SlowDirection for nalgebra::DMatrix<f64> {
    fn eigen_decomposition_real(self) -> DVector<f64> {
        let eigs = self.complex_eigenvalues();
        let slow = eigs.iter().filter(|e| e.im == 0.0).map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let n = self.nrows();
        let shifted = &self - nalgebra::DMatrix::identity(n, n) * slow;
        let svd = shifted.svd(false, true);
        let (i, _) = svd.singular_values.argmin();
        svd.v_t.unwrap().row(i).transpose().normalize()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equilibria_solve_the_output_equation(c in -6.0f64..6.0, k in 0.5f64..4.0) {
        let w = RationalTransferFunction::mass_spring_damper(1.0, 3.0, k).unwrap();
        prop_assume!((c + k).abs() > 1e-3);
        let sys = LureSystem::from_tf(&w, StaticNonlinearity::ScaledTanh(c)).unwrap();
        let set = equilibria(&sys, &EquilibriumScan::default()).unwrap();
        // Nontrivial roots exist iff the loop gain -c/k exceeds one.
        prop_assert_eq!(set.points.len(), if -c / k > 1.0 { 3 } else { 1 });
        for e in &set.points {
            prop_assert!((e.output + c * e.output.tanh() / k).abs() < 1e-10);
        }
    }
}
