//! System definition files: `[section]` headers followed by `key = value` lines.
//!
//! ```text
//! [system]
//! num = 1
//! den = 1 5 1          # ascending powers of s
//! integrator = true
//! actuator_tau = 0.1
//!
//! [nonlinearity]
//! type = tanh          # tanh | cubic | sine | linear | saturation
//! gain = -5
//!
//! [analysis]
//! lambda = 2
//! k1 = -5
//! k2 = 0
//! p = 2
//! ```

use std::collections::HashSet;

use domargin::lure::StaticNonlinearity;
use domargin::RationalTransferFunction;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityType {
    Tanh,
    Cubic,
    Sine,
    Linear,
    Saturation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityType,
    pub gain: f64,
    pub limit: Option<f64>,
}

impl NonlinearitySpec {
    pub fn build(&self) -> Result<StaticNonlinearity, CliError> {
        Ok(match self.kind {
            NonlinearityType::Tanh => StaticNonlinearity::ScaledTanh(self.gain),
            NonlinearityType::Cubic => StaticNonlinearity::Cubic(self.gain),
            NonlinearityType::Sine => StaticNonlinearity::Sine(self.gain),
            NonlinearityType::Linear => StaticNonlinearity::Linear(self.gain),
            NonlinearityType::Saturation => {
                let limit = self.limit.ok_or_else(|| CliError::Invalid("saturation needs `limit`".into()))?;
                StaticNonlinearity::saturation(self.gain, limit).map_err(|e| CliError::Invalid(e.to_string()))?
            }
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    pub lambda: Option<f64>,
    pub k: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub p: Option<i64>,
    /// Rotation angle (rad) to test against the phase margin.
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDefinition {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub integrator: bool,
    pub actuator_tau: Option<f64>,
    pub nonlinearity: Option<NonlinearitySpec>,
    pub analysis: Analysis,
}

impl SystemDefinition {
    /// Open-loop transfer function, with an optional actuator lag overriding the file's.
    pub fn transfer_function(&self, tau: Option<f64>) -> Result<RationalTransferFunction, CliError> {
        Self::assemble(&self.num, &self.den, self.integrator, tau.or(self.actuator_tau))
    }

    /// Same loop with the `s^1` coefficient of the base denominator replaced.
    pub fn with_damping(&self, d: f64, tau: Option<f64>) -> Result<RationalTransferFunction, CliError> {
        if self.den.len() < 2 {
            return Err(CliError::Invalid("sweeping d needs a denominator of degree >= 1".into()));
        }
        let mut den = self.den.clone();
        den[1] = d;
        Self::assemble(&self.num, &den, self.integrator, tau.or(self.actuator_tau))
    }

    fn assemble(
        num: &[f64],
        den: &[f64],
        integrator: bool,
        tau: Option<f64>,
    ) -> Result<RationalTransferFunction, CliError> {
        let invalid = |e: domargin::Error| CliError::Invalid(e.to_string());
        let mut w = RationalTransferFunction::from_coeffs(num, den).map_err(invalid)?;
        w.ensure_proper().map_err(invalid)?;
        if integrator {
            w = w.with_integrator();
        }
        if let Some(tau) = tau {
            if !(tau > 0.0) {
                return Err(CliError::Invalid(format!("actuator time constant must be positive, got {tau}")));
            }
            w = w.series(&RationalTransferFunction::from_coeffs(&[1.0], &[1.0, tau]).map_err(invalid)?);
        }
        Ok(w)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    System,
    Nonlinearity,
    Analysis,
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::parse(line, format!("`{key}` expects a finite number, got `{v}`"))),
    }
}

fn numbers(line: usize, key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    let out: Vec<f64> = v.split_whitespace().map(|t| number(line, key, t)).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::parse(line, format!("`{key}` needs at least one coefficient")));
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<SystemDefinition, CliError> {
    let mut section = None;
    let mut seen_sections = HashSet::new();
    let mut seen_keys = HashSet::new();
    let mut num = None;
    let mut den = None;
    let mut integrator = false;
    let mut actuator_tau = None;
    let mut nl_type = None;
    let mut nl_gain = None;
    let mut nl_limit = None;
    let mut analysis = Analysis::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::parse(line, format!("malformed section header `{content}`")))?
                .trim();
            let s = match name {
                "system" => Section::System,
                "nonlinearity" => Section::Nonlinearity,
                "analysis" => Section::Analysis,
                other => return Err(CliError::parse(line, format!("unknown section `[{other}]`"))),
            };
            if !seen_sections.insert(s) {
                return Err(CliError::parse(line, format!("duplicate section `[{name}]`")));
            }
            section = Some(s);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::parse(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| CliError::parse(line, format!("`{key}` appears before any section")))?;
        if !seen_keys.insert((sec, key.to_string())) {
            return Err(CliError::parse(line, format!("duplicate key `{key}`")));
        }
        match (sec, key) {
            (Section::System, "num") => num = Some(numbers(line, key, value)?),
            (Section::System, "den") => den = Some(numbers(line, key, value)?),
            (Section::System, "integrator") => {
                integrator = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(CliError::parse(line, format!("`integrator` expects true or false, got `{value}`"))),
                }
            }
            (Section::System, "actuator_tau") => actuator_tau = Some(number(line, key, value)?),
            (Section::Nonlinearity, "type") => {
                nl_type = Some(match value {
                    "tanh" => NonlinearityType::Tanh,
                    "cubic" => NonlinearityType::Cubic,
                    "sine" => NonlinearityType::Sine,
                    "linear" => NonlinearityType::Linear,
                    "saturation" => NonlinearityType::Saturation,
                    _ => return Err(CliError::parse(line, format!("unknown nonlinearity type `{value}`"))),
                })
            }
            (Section::Nonlinearity, "gain") => nl_gain = Some(number(line, key, value)?),
            (Section::Nonlinearity, "limit") => nl_limit = Some(number(line, key, value)?),
            (Section::Analysis, "lambda") => analysis.lambda = Some(number(line, key, value)?),
            (Section::Analysis, "k") => analysis.k = Some(number(line, key, value)?),
            (Section::Analysis, "k1") => analysis.k1 = Some(number(line, key, value)?),
            (Section::Analysis, "k2") => analysis.k2 = Some(number(line, key, value)?),
            (Section::Analysis, "phi") => analysis.phi = Some(number(line, key, value)?),
            (Section::Analysis, "p") => {
                analysis.p = Some(
                    value
                        .parse::<i64>()
                        .map_err(|_| CliError::parse(line, format!("`p` expects an integer, got `{value}`")))?,
                )
            }
            _ => return Err(CliError::parse(line, format!("unknown key `{key}`"))),
        }
    }

    let num = num.ok_or_else(|| CliError::Invalid("missing `num` in [system]".into()))?;
    let den = den.ok_or_else(|| CliError::Invalid("missing `den` in [system]".into()))?;
    let nonlinearity = match (nl_type, nl_gain) {
        (None, None) if nl_limit.is_none() => None,
        (Some(kind), Some(gain)) => {
            if nl_limit.is_some() && kind != NonlinearityType::Saturation {
                return Err(CliError::Invalid("`limit` only applies to saturation".into()));
            }
            Some(NonlinearitySpec { kind, gain, limit: nl_limit })
        }
        _ => return Err(CliError::Invalid("[nonlinearity] needs both `type` and `gain`".into())),
    };
    Ok(SystemDefinition { num, den, integrator, actuator_tau, nonlinearity, analysis })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MSD: &str = "# comment\n[system]\nnum = 1\nden = 1 5 1  # trailing\n\n[nonlinearity]\ntype = tanh\ngain = -2\n[analysis]\nlambda = 2e0\np = 1\n";

    #[test]
    fn parses_sections() {
        let def = parse(MSD).unwrap();
        assert_eq!(def.den, [1.0, 5.0, 1.0]);
        assert_eq!(def.nonlinearity.as_ref().unwrap().kind, NonlinearityType::Tanh);
        assert_eq!(def.analysis.lambda, Some(2.0));
        assert_eq!(def.analysis.p, Some(1));
        assert!(!def.integrator);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("[system]\nnum = 1\nden = 1 1\ngian = 3\n").unwrap_err();
        assert_eq!(err.to_string(), "line 4: unknown key `gian`");
        assert!(matches!(err, CliError::Parse { line: 4, .. }));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("num = 1\n").is_err());
        assert!(parse("[system]\nnum = 1\nden = x\n").is_err());
        assert!(parse("[system]\nnum = 1\nden = 1 nan\n").is_err());
        assert!(parse("[system]\nnum = 1\nnum = 2\nden = 1\n").is_err());
        assert!(parse("[systems]\n").is_err());
        assert!(parse("[system]\nnum = 1\n").is_err());
        assert!(parse("[system]\nnum = 1\nden = 1 1\n[nonlinearity]\ntype = tanh\n").is_err());
    }

    #[test]
    fn zero_denominator_is_invalid() {
        let def = parse("[system]\nnum = 1\nden = 0\n").unwrap();
        assert!(matches!(def.transfer_function(None), Err(CliError::Invalid(_))));
    }

    #[test]
    fn damping_substitution() {
        let def = parse(MSD).unwrap();
        let w = def.with_damping(3.0, None).unwrap();
        assert_eq!(w.den().coefficients(), [1.0, 3.0, 1.0]);
    }
}
