use rayon::prelude::*;

use super::gain::gain_margins;
use crate::error::{Error, Result};
use crate::format::num;
use crate::rational::RationalTransferFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub d: f64,
    /// Finite upper endpoint of the 1-gain margin `(-inf, K)`; `None` where the
    /// curve is undefined (pole on the shifted axis) or no such interval exists.
    pub k_upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalRate {
    pub d: f64,
    pub lambda: f64,
    pub k_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Ordered by parameter, then by rate.
    pub rows: Vec<SweepRow>,
    /// Rate maximizing `k_upper` for each parameter value that has at least one defined row.
    pub optimal: Vec<OptimalRate>,
}

impl SweepTable {
    /// CSV with header `lambda,d,k_upper`; gaps are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,d,k_upper\n");
        for r in &self.rows {
            let k = r.k_upper.map_or(String::new(), num);
            out.push_str(&format!("{},{},{}\n", num(r.lambda), num(r.d), k));
        }
        out
    }
}

/// Upper endpoint of the 1-gain margin that extends to `-inf`.
pub fn one_gain_upper(w: &RationalTransferFunction, lambda: f64) -> Result<Option<f64>> {
    let report = gain_margins(w, lambda)?;
    Ok(report
        .intervals
        .first()
        .filter(|i| i.lo == f64::NEG_INFINITY && i.p2 == 1 && i.hi.is_finite())
        .map(|i| i.hi))
}

/// Evaluates the 1-gain margin of `family(d)` over a rate by parameter grid.
///
/// Grid points where the shifted transfer function has a pole on the imaginary
/// axis are recorded as gaps.
pub fn margin_vs_rate_sweep<F>(family: F, lambdas: &[f64], params: &[f64]) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<RationalTransferFunction> + Sync,
{
    let cells: Vec<(f64, f64)> = params
        .iter()
        .flat_map(|&d| lambdas.iter().map(move |&l| (d, l)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(d, lambda)| {
            let w = family(d)?;
            let k_upper = match one_gain_upper(&w, lambda) {
                Ok(k) => k,
                Err(Error::RateOnPole { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow { lambda, d, k_upper })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut optimal = Vec::new();
    for &d in params {
        let best = rows
            .iter()
            .filter(|r| r.d == d)
            .filter_map(|r| r.k_upper.map(|k| (r.lambda, k)))
            .fold(None, |acc: Option<(f64, f64)>, (l, k)| match acc {
                Some((_, bk)) if bk >= k => acc,
                _ => Some((l, k)),
            });
        if let Some((lambda, k_upper)) = best {
            optimal.push(OptimalRate { d, lambda, k_upper });
        }
    }
    Ok(SweepTable { rows, optimal })
}
