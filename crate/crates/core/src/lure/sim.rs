use std::fmt;

use super::system::LureSystem;
use crate::error::{Error, Result};
use crate::format::num;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Integration stops once the state norm exceeds this.
    pub bound: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { t_final: 50.0, dt: 1e-3, bound: 1e6 }
    }
}

impl SimOptions {
    pub fn with_horizon(t_final: f64) -> Self {
        Self { t_final, ..Self::default() }
    }
}

/// Uniformly sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    /// Row-major: state `i` occupies `states[i * n..(i + 1) * n]`.
    pub states: Vec<f64>,
    pub outputs: Vec<f64>,
    pub order: usize,
    /// True when integration stopped early because the state left the bound.
    pub diverged: bool,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.order..(i + 1) * self.order]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// CSV with header `t,y`, or `t,x1,...,xn,y` when `with_states` is set.
    pub fn to_csv(&self, with_states: bool) -> String {
        let mut out = String::from("t");
        if with_states {
            for j in 1..=self.order {
                out.push_str(&format!(",x{j}"));
            }
        }
        out.push_str(",y\n");
        for i in 0..self.len() {
            out.push_str(&num(self.times[i]));
            if with_states {
                for x in self.state(i) {
                    out.push(',');
                    out.push_str(&num(*x));
                }
            }
            out.push(',');
            out.push_str(&num(self.outputs[i]));
            out.push('\n');
        }
        out
    }
}

struct Dynamics<'a> {
    sys: &'a LureSystem,
    a: Vec<f64>,
    n: usize,
}

impl Dynamics<'_> {
    fn rhs(&self, x: &[f64], out: &mut [f64]) {
        let lin = self.sys.linear();
        let u = -self.sys.nonlinearity().eval(self.sys.output(x));
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + lin.b[i] * u;
        }
    }
}

/// Fixed-step classical Runge-Kutta integration of `x' = A x - B phi(C x)`.
pub fn simulate(sys: &LureSystem, x0: &[f64], opts: &SimOptions) -> Result<SimulationTrace> {
    let n = sys.order();
    if x0.len() != n {
        return Err(Error::Dimension(format!("initial state has {} entries, system order is {n}", x0.len())));
    }
    if !(opts.dt > 0.0) || !(opts.t_final >= opts.dt) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and T >= dt, got dt = {}, T = {}",
            opts.dt, opts.t_final
        )));
    }
    let steps = (opts.t_final / opts.dt).round() as usize;
    let a = sys.linear().a.transpose().as_slice().to_vec();
    let dynamics = Dynamics { sys, a, n };

    let mut trace = SimulationTrace {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity((steps + 1) * n),
        outputs: Vec::with_capacity(steps + 1),
        order: n,
        diverged: false,
    };
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let h = opts.dt;
    for step in 0..=steps {
        trace.times.push(step as f64 * h);
        trace.states.extend_from_slice(&x);
        trace.outputs.push(sys.output(&x));
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() > opts.bound || x.iter().any(|v| !v.is_finite()) {
            trace.diverged = true;
            break;
        }
        if step == steps {
            break;
        }
        dynamics.rhs(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        dynamics.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        dynamics.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        dynamics.rhs(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttractorKind {
    /// Output value at rest.
    Equilibrium(f64),
    /// Mean interval between output maxima and peak-to-peak output amplitude.
    LimitCycle { period: f64, amplitude: f64 },
    Unbounded,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorVerdict {
    pub kind: AttractorKind,
    pub tail_mean: f64,
    /// Peak-to-peak output over the tail.
    pub tail_variation: f64,
    pub peak_count: usize,
    /// Relative standard deviation of the intervals between maxima.
    pub interval_spread: Option<f64>,
}

impl fmt::Display for AttractorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AttractorKind::Equilibrium(y) => write!(f, "equilibrium({})", num(y)),
            AttractorKind::LimitCycle { period, amplitude } => {
                write!(f, "limit_cycle(period={}, amplitude={})", num(period), num(amplitude))
            }
            AttractorKind::Unbounded => f.write_str("unbounded"),
            AttractorKind::Undetermined => f.write_str("undetermined"),
        }
    }
}

/// Fraction of the trace discarded as transient.
const TRANSIENT: f64 = 0.6;
const MIN_SPAN: f64 = 10.0;

/// Times of interior output maxima, refined by a parabola through each peak and its neighbours.
fn peak_times(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            let shift = if denom != 0.0 { 0.5 * (y[i - 1] - y[i + 1]) / denom } else { 0.0 };
            let h = t[i + 1] - t[i];
            out.push(t[i] + shift.clamp(-0.5, 0.5) * h);
        }
    }
    out
}

pub fn classify(trace: &SimulationTrace) -> AttractorVerdict {
    let undetermined = AttractorVerdict {
        kind: AttractorKind::Undetermined,
        tail_mean: f64::NAN,
        tail_variation: f64::NAN,
        peak_count: 0,
        interval_spread: None,
    };
    if trace.diverged {
        return AttractorVerdict { kind: AttractorKind::Unbounded, ..undetermined };
    }
    if trace.len() < 3 || trace.times[trace.len() - 1] - trace.times[0] < MIN_SPAN {
        return undetermined;
    }
    let start = ((trace.len() as f64) * TRANSIENT).floor() as usize;
    let (t, y) = (&trace.times[start..], &trace.outputs[start..]);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let variation = hi - lo;
    let peaks = peak_times(t, y);
    let mut verdict = AttractorVerdict {
        kind: AttractorKind::Undetermined,
        tail_mean: mean,
        tail_variation: variation,
        peak_count: peaks.len(),
        interval_spread: None,
    };
    if variation < 1e-6 * (1.0 + mean.abs()) {
        verdict.kind = AttractorKind::Equilibrium(mean);
        return verdict;
    }
    if peaks.len() >= 3 {
        let intervals: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
        let m = intervals.iter().sum::<f64>() / intervals.len() as f64;
        let var = intervals.iter().map(|d| (d - m).powi(2)).sum::<f64>() / intervals.len() as f64;
        let spread = var.sqrt() / m;
        verdict.interval_spread = Some(spread);
        if variation > 1e-6 && spread < 0.01 {
            verdict.kind = AttractorKind::LimitCycle { period: m, amplitude: variation };
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lure::StaticNonlinearity;
    use crate::rational::RationalTransferFunction;

    fn bistable() -> LureSystem {
        let w = RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap();
        LureSystem::from_tf(&w, StaticNonlinearity::ScaledTanh(-2.0)).unwrap()
    }

    fn synthetic(y: impl Fn(f64) -> f64, t_final: f64) -> SimulationTrace {
        let times: Vec<f64> = (0..=(t_final * 100.0) as usize).map(|i| i as f64 * 0.01).collect();
        let outputs: Vec<f64> = times.iter().map(|&t| y(t)).collect();
        SimulationTrace { states: outputs.clone(), times, outputs, order: 1, diverged: false }
    }

    #[test]
    fn origin_stays_put() {
        let trace = simulate(&bistable(), &[0.0, 0.0], &SimOptions::default()).unwrap();
        assert_eq!(trace.len(), 50_001);
        assert!(trace.final_state().iter().all(|x| x.abs() < 1e-9));
        assert_eq!(classify(&trace).kind, AttractorKind::Equilibrium(0.0));
    }

    #[test]
    fn bistable_converges() {
        // Reference values from an independent tight-tolerance integration.
        let trace = simulate(&bistable(), &[0.1, 0.0], &SimOptions::default()).unwrap();
        assert!((trace.outputs.last().unwrap() - 1.912_547_975).abs() < 1e-8);
        let trace = simulate(&bistable(), &[0.1, 0.0], &SimOptions::with_horizon(60.0)).unwrap();
        assert!((trace.outputs.last().unwrap() - 1.915_008_048).abs() < 1e-3);
        let mirrored = simulate(&bistable(), &[-0.1, 0.0], &SimOptions::with_horizon(60.0)).unwrap();
        assert_eq!(mirrored.outputs.last().unwrap(), &-trace.outputs.last().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let sys = bistable();
        assert!(simulate(&sys, &[0.0], &SimOptions::default()).is_err());
        assert!(simulate(&sys, &[0.0, 0.0], &SimOptions { dt: 0.0, ..SimOptions::default() }).is_err());
        assert!(simulate(&sys, &[0.0, 0.0], &SimOptions { t_final: 1e-4, ..SimOptions::default() }).is_err());
    }

    #[test]
    fn divergence_halts() {
        let w = RationalTransferFunction::from_coeffs(&[1.0], &[-1.0, 1.0]).unwrap();
        let sys = LureSystem::from_tf(&w, StaticNonlinearity::Linear(0.0)).unwrap();
        let trace = simulate(&sys, &[1.0], &SimOptions::default()).unwrap();
        assert!(trace.diverged);
        assert!(trace.times.last().unwrap() < &15.0);
        assert_eq!(classify(&trace).kind, AttractorKind::Unbounded);
    }

    #[test]
    fn classify_synthetic() {
        let v = classify(&synthetic(|t| (2.0 * std::f64::consts::PI * t / 3.0).sin(), 100.0));
        match v.kind {
            AttractorKind::LimitCycle { period, amplitude } => {
                assert!((period - 3.0).abs() < 1e-3);
                assert!((amplitude - 2.0).abs() < 1e-3);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(classify(&synthetic(|_| 0.0, 20.0)).kind, AttractorKind::Equilibrium(0.0));
        assert_eq!(classify(&synthetic(|_| 1.0, 5.0)).kind, AttractorKind::Undetermined);
        // Chirp: peak spacing drifts.
        assert_eq!(classify(&synthetic(|t| (0.05 * t * t).sin(), 100.0)).kind, AttractorKind::Undetermined);
    }

    #[test]
    fn csv_headers() {
        let trace = simulate(&bistable(), &[0.5, 0.0], &SimOptions { t_final: 0.002, dt: 0.001, bound: 1e6 }).unwrap();
        let csv = trace.to_csv(false);
        assert!(csv.starts_with("t,y\n0,0.5\n"));
        assert!(trace.to_csv(true).starts_with("t,x1,x2,y\n0,0.5,0,0.5\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
