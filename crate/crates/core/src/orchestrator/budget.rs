//! Cartesian sweeps of the gate-error budget.

use std::fmt::Write as _;

use super::experiment::par_map;
use crate::error::{Error, Result};
use crate::qubit::gate_error_budget;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepAxes {
    pub eta: Vec<f64>,
    pub nbar: Vec<f64>,
    pub cycles: Vec<f64>,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetRow {
    pub eta: f64,
    pub nbar: f64,
    pub cycles: f64,
    pub eps: f64,
    pub gamma_thermal: f64,
    pub lower_bound: f64,
}

impl SweepAxes {
    /// Applies `axis=v1,v2,...`; several axes may be joined with `;`.
    pub fn apply(&mut self, spec: &str) -> Result<()> {
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (axis, values) = part
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("sweep `{part}` is not axis=values")))?;
            let parsed: Vec<f64> = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::domain(format!("sweep `{part}` has a non-numeric value")))?;
            let slot = match axis.trim() {
                "eta" => &mut self.eta,
                "nbar" => &mut self.nbar,
                "N" | "cycles" => &mut self.cycles,
                "eps" | "epsilon" => &mut self.eps,
                other => return Err(Error::domain(format!("unknown sweep axis `{other}` (eta, nbar, N, eps)"))),
            };
            *slot = parsed;
        }
        Ok(())
    }
}

pub fn budget_sweep(axes: &SweepAxes) -> Result<Vec<BudgetRow>> {
    for (name, v) in [("eta", &axes.eta), ("nbar", &axes.nbar), ("N", &axes.cycles), ("eps", &axes.eps)] {
        if v.is_empty() {
            return Err(Error::domain(format!("sweep axis `{name}` is empty")));
        }
    }
    let mut cells = Vec::new();
    for &eta in &axes.eta {
        for &nbar in &axes.nbar {
            for &cycles in &axes.cycles {
                for &eps in &axes.eps {
                    cells.push((eta, nbar, cycles, eps));
                }
            }
        }
    }
    par_map(&cells, |&(eta, nbar, cycles, eps)| {
        let b = gate_error_budget(eta, nbar, cycles, eps)?;
        Ok(BudgetRow {
            eta,
            nbar,
            cycles,
            eps,
            gamma_thermal: b.gamma_thermal,
            lower_bound: b.lower_bound,
        })
    })
    .into_iter()
    .collect()
}

pub fn budget_csv(rows: &[BudgetRow], metadata: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("eta,nbar,N,eps,gamma_T,gamma_bound\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.eta, r.nbar, r.cycles, r.eps, r.gamma_thermal, r.lower_bound
        );
    }
    out
}
