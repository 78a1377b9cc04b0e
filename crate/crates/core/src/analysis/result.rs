use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A quantity computed from fitted parameters with propagated uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub name: String,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model_name: String,
    pub param_names: Vec<String>,
    pub params: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// √χ² of the weighted residuals.
    pub residual_norm: f64,
    pub points: usize,
    pub converged: bool,
    pub iterations: usize,
    pub derived: Vec<Derived>,
    /// Conditions the caller should know about, e.g. `not_converged`.
    pub flags: Vec<String>,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.params[i])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.sigmas[i])
    }

    pub fn derived(&self, name: &str) -> Option<&Derived> {
        self.derived.iter().find(|d| d.name == name)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub(crate) fn flag(&mut self, flag: &str) {
        if !self.has_flag(flag) {
            self.flags.push(flag.to_string());
        }
    }

    pub(crate) fn push_derived(&mut self, name: &str, value: f64, sigma: f64) {
        self.derived.push(Derived {
            name: name.to_string(),
            value,
            sigma,
        });
    }

    /// Variance of `Σ g_i p_i` for gradient `g` against the covariance.
    pub fn propagate(&self, g: &[f64]) -> f64 {
        let mut v = 0.0;
        for (i, gi) in g.iter().enumerate() {
            for (j, gj) in g.iter().enumerate() {
                if *gi != 0.0 && *gj != 0.0 {
                    v += gi * self.covariance[i][j] * gj;
                }
            }
        }
        v
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["model".to_string(), "converged".into(), "iterations".into(), "residual_norm".into()];
        for n in self.param_names.iter().chain(self.derived.iter().map(|d| &d.name)) {
            cols.push(n.clone());
            cols.push(format!("{n}_sigma"));
        }
        cols.push("flags".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.model_name.clone(),
            self.converged.to_string(),
            self.iterations.to_string(),
            self.residual_norm.to_string(),
        ];
        let values = self.params.iter().zip(&self.sigmas).map(|(v, s)| (*v, *s));
        for (v, s) in values.chain(self.derived.iter().map(|d| (d.value, d.sigma))) {
            cols.push(v.to_string());
            cols.push(s.to_string());
        }
        cols.push(self.flags.join(";"));
        cols.join(",")
    }

    /// Header and row, preceded by `# key=value` metadata lines.
    pub fn to_csv(&self, metadata: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.csv_header());
        let _ = writeln!(out, "{}", self.csv_row());
        out
    }

    pub fn write_csv(&self, path: &Path, metadata: &[(String, String)]) -> Result<()> {
        std::fs::write(path, self.to_csv(metadata)).map_err(|e| Error::io(path, e))
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let status = if self.converged { "converged" } else { "NOT converged" };
        let _ = writeln!(
            out,
            "fit {}: {status} after {} iterations, {} points, residual norm {:.4}",
            self.model_name, self.iterations, self.points, self.residual_norm
        );
        let width = self
            .param_names
            .iter()
            .chain(self.derived.iter().map(|d| &d.name))
            .map(|n| n.len())
            .max()
            .unwrap_or(0);
        for (n, (v, s)) in self.param_names.iter().zip(self.params.iter().zip(&self.sigmas)) {
            let _ = writeln!(out, "  {n:<width$} = {v:.6e} +/- {s:.3e}");
        }
        for d in &self.derived {
            let _ = writeln!(out, "  {:<width$} = {:.6e} +/- {:.3e}  (derived)", d.name, d.value, d.sigma);
        }
        if !self.flags.is_empty() {
            let _ = writeln!(out, "  flags: {}", self.flags.join(", "));
        }
        out
    }
}

/// Fringe amplitudes against cooling-cycle count, the input of the contrast
/// decay fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecayData {
    pub cycles: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Amplitude of the control experiment, used to normalize.
    pub control: Option<(f64, f64)>,
    pub metadata: Vec<(String, String)>,
}

impl DecayData {
    pub fn push(&mut self, cycles: f64, amplitude: f64, sigma: f64) {
        self.cycles.push(cycles);
        self.amplitude.push(amplitude);
        self.sigma.push(sigma);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        if let Some((a, s)) = self.control {
            let _ = writeln!(out, "# control_amplitude={a}");
            let _ = writeln!(out, "# control_sigma={s}");
        }
        out.push_str("cycles,amplitude,sigma\n");
        for i in 0..self.cycles.len() {
            let _ = writeln!(out, "{},{},{}", self.cycles[i], self.amplitude[i], self.sigma[i]);
        }
        out
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: &str| Error::Parse {
            origin: origin.to_string(),
            line,
            message: message.to_string(),
        };
        let mut d = DecayData::default();
        let (mut ctrl_a, mut ctrl_s) = (None, None);
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta.trim_start().split_once('=').ok_or_else(|| err(lineno, "metadata without '='"))?;
                match k {
                    "control_amplitude" => ctrl_a = Some(v.parse::<f64>().map_err(|_| err(lineno, "bad control"))?),
                    "control_sigma" => ctrl_s = Some(v.parse::<f64>().map_err(|_| err(lineno, "bad control"))?),
                    _ => d.metadata.push((k.to_string(), v.to_string())),
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                if line.trim() != "cycles,amplitude,sigma" {
                    return Err(err(lineno, "expected columns cycles,amplitude,sigma"));
                }
                header_seen = true;
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(lineno, "non-numeric value"))?;
            if v.len() != 3 {
                return Err(err(lineno, "expected three columns"));
            }
            d.push(v[0], v[1], v[2]);
        }
        if let Some(a) = ctrl_a {
            d.control = Some((a, ctrl_s.unwrap_or(0.0)));
        }
        Ok(d)
    }
}
