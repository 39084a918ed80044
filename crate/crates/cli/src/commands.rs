use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use domargin::dominance::{certify_lti, dominance_degree_lti};
use domargin::format::num;
use domargin::lure::{
    classify, equilibria, simulate, AttractorKind, EquilibriumScan, LureSystem, SimOptions, StaticNonlinearity,
};
use domargin::margins::{
    circle_criterion, disk_margin_check, gain_margins, hinf_lambda_norm, margin_vs_rate_sweep, phase_margins, Disk,
    DiskKind, SectorCase, SignChangeMode,
};
use domargin::nyquist::{real_axis_crossings, sample_curve, SampleOptions};
use domargin::{RationalTransferFunction, StateSpace};
use rayon::prelude::*;

use crate::error::CliError;
use crate::report::{to_stdout, write_atomic, RunReport};
use crate::svg;
use crate::sysfile::{self, SystemDefinition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MarginMode {
    Gain,
    Phase,
    Disk,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DiskMode {
    Literal,
    Classical,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// System definition file.
    pub file: PathBuf,
    /// Dominance rate; overrides `lambda` in [analysis].
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Actuator time constant; overrides `actuator_tau` in [system].
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output file (a directory for `simulate`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Session {
    pub def: SystemDefinition,
    pub report: RunReport,
    pub common: Common,
}

impl Session {
    pub fn open(common: Common, command: String) -> Result<Self, CliError> {
        let bytes = fs::read(&common.file)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", common.file.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Invalid(format!("{} is not UTF-8", common.file.display())))?;
        let def = sysfile::parse(&text)?;
        Ok(Self { def, report: RunReport::new(command, &bytes), common })
    }

    fn lambda(&self) -> Result<f64, CliError> {
        let l = self
            .common
            .lambda
            .or(self.def.analysis.lambda)
            .ok_or_else(|| CliError::Invalid("lambda is required (--lambda or `lambda` in [analysis])".into()))?;
        if !(l >= 0.0 && l.is_finite()) {
            return Err(CliError::Invalid(format!("lambda must be non-negative, got {l}")));
        }
        Ok(l)
    }

    fn tf(&self) -> Result<RationalTransferFunction, CliError> {
        self.def.transfer_function(self.common.tau)
    }

    fn nonlinearity(&self) -> Result<Option<StaticNonlinearity>, CliError> {
        self.def.nonlinearity.as_ref().map(|n| n.build()).transpose()
    }

    /// Sector from flags, then [analysis], then the nonlinearity's own slope bounds.
    fn sector(&self, k1: Option<f64>, k2: Option<f64>) -> Result<(f64, f64), CliError> {
        let k1 = k1.or(self.def.analysis.k1);
        let k2 = k2.or(self.def.analysis.k2);
        match (k1, k2) {
            (Some(a), Some(b)) => Ok((a, b)),
            (None, None) => {
                let nl = self
                    .nonlinearity()?
                    .ok_or_else(|| CliError::Invalid("k1 and k2 are required".into()))?;
                let b = nl.sector_bounds();
                if !b.is_bounded() {
                    return Err(CliError::Invalid(format!("nonlinearity has unbounded slope sector {b}")));
                }
                Ok((b.k1, b.k2))
            }
            _ => Err(CliError::Invalid("give both k1 and k2".into())),
        }
    }

    fn p_target(&self, flag: Option<i64>) -> Result<i64, CliError> {
        flag.or(self.def.analysis.p)
            .ok_or_else(|| CliError::Invalid("target degree p is required (--p or `p` in [analysis])".into()))
    }

    /// Sends the report (text) or `csv` to `--out` or stdout.
    fn emit(&self, csv: Option<String>) -> Result<(), CliError> {
        let payload = match (self.common.format, csv) {
            (Format::Csv, Some(csv)) => csv,
            _ => self.report.render(),
        };
        match &self.common.out {
            Some(path) => write_atomic(path, &payload),
            None => to_stdout(&payload),
        }
    }
}

fn disk(k1: f64, k2: f64) -> Result<Disk, CliError> {
    Disk::new(k1, k2).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn nyquist(mut s: Session, k1: Option<f64>, k2: Option<f64>, svg_out: Option<&Path>) -> Result<(), CliError> {
    let lambda = s.lambda()?;
    let curve = sample_curve(&s.tf()?, lambda, &SampleOptions::default())?;
    let csv = curve.to_csv();
    match &s.common.out {
        Some(path) => write_atomic(path, &csv)?,
        None => to_stdout(&csv)?,
    }
    if let Some(path) = svg_out {
        let d = match (k1.or(s.def.analysis.k1), k2.or(s.def.analysis.k2)) {
            (Some(a), Some(b)) => Some(disk(a, b)?),
            _ => None,
        };
        write_atomic(path, &svg::render(&curve, d.as_ref()))?;
    }
    let mut r = String::new();
    let _ = writeln!(r, "lambda = {}", num(lambda));
    let _ = writeln!(r, "samples = {}", curve.points.len());
    let _ = writeln!(r, "omega_max = {}", num(curve.omega_max));
    let _ = writeln!(r, "value_at_zero = {}", num(curve.points[0].re));
    let _ = writeln!(r, "value_at_infinity = {}", num(curve.value_at_infinity.re));
    let xs: Vec<String> = real_axis_crossings(&curve).values().into_iter().map(num).collect();
    let _ = writeln!(r, "real_axis_crossings = {}", xs.join(" "));
    if !curve.is_closed() {
        s.report.warn("sampled arc did not close at omega_max");
    }
    s.report.results = r;
    eprint!("{}", s.report.render());
    Ok(())
}

pub struct MarginArgs {
    pub mode: MarginMode,
    pub k: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub p: Option<i64>,
    pub disk_mode: DiskMode,
}

pub fn margins(mut s: Session, a: MarginArgs) -> Result<(), CliError> {
    let lambda = s.lambda()?;
    let w = s.tf()?;
    let csv = match a.mode {
        MarginMode::Gain => {
            let r = gain_margins(&w, lambda)?;
            s.report.results = r.to_string();
            r.to_csv()
        }
        MarginMode::Phase => {
            let k = a.k.or(s.def.analysis.k).ok_or_else(|| CliError::Invalid("phase margins need k".into()))?;
            if k == 0.0 {
                return Err(CliError::Invalid("k must be nonzero".into()));
            }
            let p2 = s.p_target(a.p)?;
            let r = phase_margins(&w, lambda, k, p2)?;
            let mut text = r.to_string();
            if let Some(phi) = s.def.analysis.phi {
                let _ = writeln!(text, "phi = {} admissible = {}", num(phi), r.contains(phi));
            }
            s.report.results = text;
            r.to_csv()
        }
        MarginMode::Disk => {
            let (k1, k2) = s.sector(a.k1, a.k2)?;
            let d = disk(k1, k2)?;
            let r = disk_margin_check(&w, lambda, &d, s.p_target(a.p)?)?;
            if d.kind() == DiskKind::ComplementOfDisk {
                s.report.warn("sign-changing sector: the set is the complement of the closed disk");
            }
            s.report.results = r.to_string();
            r.to_csv()
        }
        MarginMode::Circle => {
            let (k1, k2) = s.sector(a.k1, a.k2)?;
            disk(k1, k2)?;
            let mode = match a.disk_mode {
                DiskMode::Literal => SignChangeMode::Literal,
                DiskMode::Classical => SignChangeMode::Classical,
            };
            let r = circle_criterion(&w, lambda, k1, k2, mode)?;
            if r.case == SectorCase::SignChange {
                s.report.warn(format!("sign-changing sector evaluated in {mode} mode"));
            }
            if let Some(nl) = s.nonlinearity()? {
                if !nl.verify_sector(k1, k2, 10_001).map_err(|e| CliError::Invalid(e.to_string()))? {
                    s.report.warn(format!("slope of {nl} leaves [{}, {}]", num(k1), num(k2)));
                }
            }
            s.report.results = r.to_string();
            let opt = |v: Option<i64>| v.map_or(String::new(), |x| x.to_string());
            format!(
                "p,satisfied,q,encirclements_cw,curve_condition,min_distance\n{},{},{},{},{},{}\n",
                opt(r.p),
                r.satisfied,
                opt(r.q.map(|q| q as i64)),
                opt(r.encirclements_cw),
                r.curve_condition,
                num(r.min_distance)
            )
        }
    };
    s.emit(Some(csv))
}

fn parse_state(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Invalid(format!("bad initial state `{text}`")))
        })
        .collect()
}

pub struct SimArgs {
    pub x0: Vec<String>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub states: bool,
}

pub fn simulate_cmd(mut s: Session, a: SimArgs) -> Result<(), CliError> {
    let nl = s
        .nonlinearity()?
        .ok_or_else(|| CliError::Invalid("simulation needs a [nonlinearity] section".into()))?;
    let sys = LureSystem::from_tf(&s.tf()?, nl).map_err(|e| CliError::Invalid(e.to_string()))?;
    let n = sys.order();
    let x0s: Vec<Vec<f64>> = if a.x0.is_empty() {
        let mut x = vec![0.0; n];
        x[0] = 0.1;
        vec![x]
    } else {
        a.x0.iter().map(|t| parse_state(t)).collect::<Result<_, _>>()?
    };
    if let Some(bad) = x0s.iter().find(|x| x.len() != n) {
        return Err(CliError::Invalid(format!("initial state has {} entries, system order is {n}", bad.len())));
    }
    let defaults = SimOptions::default();
    let opts = SimOptions { t_final: a.t_final.unwrap_or(defaults.t_final), dt: a.dt.unwrap_or(defaults.dt), ..defaults };
    if !(opts.dt > 0.0 && opts.t_final >= opts.dt) {
        return Err(CliError::Invalid(format!("need dt > 0 and T >= dt, got dt = {}, T = {}", opts.dt, opts.t_final)));
    }

    let traces = x0s
        .par_iter()
        .map(|x0| simulate(&sys, x0, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(dir) = &s.common.out {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        for (i, t) in traces.iter().enumerate() {
            write_atomic(&dir.join(format!("trace_{i}.csv")), &t.to_csv(a.states))?;
        }
    }

    let mut text = String::new();
    match equilibria(&sys, &EquilibriumScan::default()) {
        Ok(set) => {
            text.push_str(&set.to_string());
            if set.boundary_warning {
                s.report.warn("equilibria may exist outside the scan window [-100, 100]");
            }
        }
        Err(e) => s.report.warn(format!("equilibria not computed: {e}")),
    }
    let mut csv = String::from("x0,kind,output,period,amplitude\n");
    for (x0, trace) in x0s.iter().zip(&traces) {
        let v = classify(trace);
        let label: Vec<String> = x0.iter().map(|x| num(*x)).collect();
        let _ = writeln!(text, "x0 = ({}): {v}", label.join(", "));
        let (kind, out, period, amp) = match v.kind {
            AttractorKind::Equilibrium(y) => ("equilibrium", num(y), String::new(), String::new()),
            AttractorKind::LimitCycle { period, amplitude } => {
                ("limit_cycle", String::new(), num(period), num(amplitude))
            }
            AttractorKind::Unbounded => ("unbounded", String::new(), String::new(), String::new()),
            AttractorKind::Undetermined => ("undetermined", String::new(), String::new(), String::new()),
        };
        let _ = writeln!(csv, "{},{kind},{out},{period},{amp}", label.join(" "));
    }
    s.report.results = text;
    // Trace files take --out; the summary goes to stdout.
    let payload = match s.common.format {
        Format::Csv => csv,
        Format::Text => s.report.render(),
    };
    to_stdout(&payload)
}

/// `a:b:step`, inclusive of `b` up to rounding.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Invalid(format!("range must be start:stop:step, got `{text}`"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    let [a, b, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || b < a {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError::Invalid(format!("range `{text}` has too many points")));
    }
    // Snap to 12 significant digits so 0.1 steps land on the decimal grid.
    Ok((0..count)
        .map(|i| format!("{:.11e}", a + step * i as f64).parse().unwrap())
        .collect())
}

pub fn sweep(mut s: Session, lambda_range: &str, d_range: &str) -> Result<(), CliError> {
    let lambdas = parse_range(lambda_range)?;
    let ds = parse_range(d_range)?;
    let tau = s.common.tau;
    s.def.with_damping(ds[0], tau)?;
    let def = s.def.clone();
    let family = |d: f64| {
        def.with_damping(d, tau)
            .map_err(|e| domargin::Error::InvalidArgument(e.to_string()))
    };
    let table = margin_vs_rate_sweep(family, &lambdas, &ds)?;
    let csv = table.to_csv();
    let mut text = csv.clone();
    for o in &table.optimal {
        let _ = writeln!(text, "optimal d = {} lambda = {} k_upper = {}", num(o.d), num(o.lambda), num(o.k_upper));
    }
    let gaps = table.rows.iter().filter(|r| r.k_upper.is_none()).count();
    if gaps > 0 {
        s.report.warn(format!("{gaps} grid points without a finite 1-gain margin"));
    }
    s.report.results = text;
    s.emit(Some(csv))
}

pub fn certify(mut s: Session, k: Option<f64>, p: Option<i64>) -> Result<(), CliError> {
    let lambda = s.lambda()?;
    let ss = StateSpace::from_tf(&s.tf()?)?;
    if ss.order() == 0 {
        return Err(CliError::Invalid("system has no state".into()));
    }
    let (a, source) = match (k.or(s.def.analysis.k), s.nonlinearity()?) {
        (Some(k), _) => (ss.closed_loop_a(k), format!("closed loop with k = {}", num(k))),
        (None, Some(nl)) => {
            let slope = nl.derivative(0.0);
            (ss.closed_loop_a(slope), format!("closed loop linearized at y = 0 (slope {})", num(slope)))
        }
        (None, None) => (ss.a.clone(), "open loop".to_string()),
    };
    let p = match p.or(s.def.analysis.p) {
        Some(p) if p < 0 => return Err(CliError::Invalid(format!("p must be non-negative, got {p}"))),
        Some(p) => p as usize,
        None => dominance_degree_lti(&a, lambda)?,
    };
    let cert = certify_lti(&a, lambda, p)?;
    s.report.results = format!("matrix = {source}\n{}", cert.to_text());
    s.emit(None)
}

pub fn norm(mut s: Session) -> Result<(), CliError> {
    let lambda = s.lambda()?;
    let value = hinf_lambda_norm(&s.tf()?, lambda)?;
    s.report.results = format!("{}\n", num(value));
    s.emit(Some(format!("lambda,norm\n{},{}\n", num(lambda), num(value))))
}
