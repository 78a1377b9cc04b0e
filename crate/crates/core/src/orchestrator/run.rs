//! Executes a configured sequence and writes every record, fit and table.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, Stage};
use super::experiment::{derive_seed, Experiment};
use crate::analysis::FitResult;
use crate::crystal::Mode;
use crate::error::{Error, Result};
use crate::measurement::ExperimentRecord;
use crate::motion::FockDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub stage: String,
    pub quantity: String,
    pub value: f64,
    pub sigma: f64,
    pub unit: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
}

impl RunOutput {
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        for r in &self.summary {
            let sigma = if r.sigma.is_nan() { String::new() } else { format!(" +/- {:.3e}", r.sigma) };
            let _ = writeln!(out, "{:<28} {:<20} {:.6e}{sigma} {}", r.stage, r.quantity, r.value, r.unit);
        }
        out
    }
}

/// Writes files under one directory, each stamped with the configuration
/// hash and run seed.
struct Artifacts<'a> {
    dir: &'a Path,
    config: &'a ExperimentConfig,
    files: Vec<PathBuf>,
    summary: Vec<SummaryRow>,
}

impl Artifacts<'_> {
    fn header(&self) -> Vec<(String, String)> {
        vec![
            ("config".into(), self.config.name.clone()),
            ("config_hash".into(), self.config.hash.clone()),
            ("seed".into(), self.config.seed.to_string()),
        ]
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let mut text = String::new();
        for (k, v) in self.header() {
            let _ = writeln!(text, "# {k}={v}");
        }
        text.push_str(body);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn record(&mut self, name: &str, rec: &ExperimentRecord) -> Result<()> {
        let mut rec = rec.clone();
        rec.set_meta("config", &self.config.name);
        rec.set_meta("config_hash", &self.config.hash);
        rec.set_meta("run_seed", self.config.seed);
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        rec.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn fit(&mut self, name: &str, fit: &FitResult) -> Result<()> {
        let body = format!("{}\n{}\n", fit.csv_header(), fit.csv_row());
        self.write(name, &body)
    }

    fn row(&mut self, stage: &str, quantity: &str, value: f64, sigma: f64, unit: &str) {
        self.summary.push(SummaryRow {
            stage: stage.to_string(),
            quantity: quantity.to_string(),
            value,
            sigma,
            unit: unit.to_string(),
        });
    }
}

fn stage_label(k: usize, stage: &Stage) -> String {
    let name = match stage {
        Stage::Precool(_) => "precool",
        Stage::Cool { .. } => "cool",
        Stage::Thermometry { .. } => "thermometry",
        Stage::CoolingSeries { .. } => "cooling_series",
        Stage::RepumpControl { .. } => "repump_control",
        Stage::RepumpScan => "repump_scan",
    };
    format!("s{k}_{name}")
}

/// Runs every stage of `config`, writing outputs into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput> {
    let exp = Experiment::new(config.clone())?;
    run_experiment(&exp, out_dir)
}

pub fn run_experiment(exp: &Experiment, out_dir: &Path) -> Result<RunOutput> {
    let config = &exp.config;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut art = Artifacts {
        dir: out_dir,
        config,
        files: Vec::new(),
        summary: Vec::new(),
    };

    let mut modes_table = String::from("mode,ratio,frequency_hz,eta_coolant,eta_memory\n");
    for m in Mode::ALL {
        let _ = writeln!(
            modes_table,
            "{},{},{},{},{}",
            m.label(),
            exp.modes.ratio(m),
            exp.modes.frequency(m) / TAU,
            exp.eta[0][m.index()],
            exp.eta[1][m.index()]
        );
        art.row("crystal", &format!("ratio_{}", m.label()), exp.modes.ratio(m), f64::NAN, "1");
        art.row("crystal", &format!("eta_{}", m.label()), exp.eta[0][m.index()], f64::NAN, "1");
    }
    art.write("modes.csv", &modes_table)?;

    let b = crate::qubit::scattering_per_cycle(&exp.gap.scatter);
    art.row("scatter", "r_rsb", b.r_rsb, f64::NAN, "1");
    art.row("scatter", "r_sigma", b.r_sigma, f64::NAN, "1");
    art.row("scatter", "h_factor", exp.h_factor, f64::NAN, "1");
    art.row("scatter", "eps_raman", exp.gap.eps_raman, f64::NAN, "1");
    art.row("pumping", "alpha", exp.alpha, f64::NAN, "1/s");
    art.row("pumping", "delta_q", exp.delta_q / TAU, f64::NAN, "Hz");

    let initial = exp.precooled(super::config::Precool::Raman)?;
    let mut dists: [FockDistribution; 2] = [initial.clone(), initial];

    for (k, stage) in config.sequence.iter().enumerate() {
        let label = stage_label(k, stage);
        let seed = derive_seed(config.seed, &[k as u64]);
        match stage {
            Stage::Precool(method) => {
                let d = exp.precooled(*method)?;
                dists = [d.clone(), d];
                art.row(&label, "nbar", dists[0].mean_n(), f64::NAN, "1");
            }
            Stage::Cool { cycles, modes } => {
                let mut table = String::from("cycle,mode,nbar,p0\n");
                for m in modes {
                    let traj = exp.cooling_trajectory(*m, &dists[m.index()], *cycles);
                    for (c, d) in traj.iter().enumerate() {
                        let _ = writeln!(table, "{c},{},{},{}", m.label(), d.mean_n(), d.p(0));
                    }
                    let last = traj.last().expect("trajectory holds the initial state").clone();
                    art.row(&label, &format!("nbar_{}", m.label()), last.mean_n(), f64::NAN, "1");
                    art.row(&label, &format!("p0_{}", m.label()), last.p(0), f64::NAN, "1");
                    dists[m.index()] = last;
                }
                art.write(&format!("{label}.csv"), &table)?;
            }
            Stage::Thermometry { modes } => {
                for m in modes {
                    let s = derive_seed(seed, &[m.index() as u64]);
                    let (rec, fit) = exp.thermometry(*m, &dists[m.index()], s)?;
                    art.record(&format!("{label}_{}_record.csv", m.label()), &rec)?;
                    art.fit(&format!("{label}_{}_fit.csv", m.label()), &fit)?;
                    let nbar = fit.derived("nbar").expect("sideband fit reports nbar");
                    art.row(&label, &format!("nbar_{}_true", m.label()), dists[m.index()].mean_n(), f64::NAN, "1");
                    art.row(&label, &format!("nbar_{}_fit", m.label()), nbar.value, nbar.sigma, "1");
                }
            }
            Stage::CoolingSeries { max_cycles, datasets } => {
                let series = exp.contrast_series(*max_cycles, *datasets, seed)?;
                let mut table = String::from("cycles,dataset,nbar_true,nbar_fit,nbar_sigma,amplitude,amplitude_sigma,phase,phase_sigma\n");
                for p in &series.points {
                    let n = p.thermometry.1.derived("nbar").expect("sideband fit reports nbar");
                    let f = &p.ramsey.1;
                    let _ = writeln!(
                        table,
                        "{},{},{},{},{},{},{},{},{}",
                        p.cycles, p.dataset, p.nbar_truth, n.value, n.sigma, f.params[0], f.sigmas[0], f.params[1], f.sigmas[1]
                    );
                    let stem = format!("{label}_records/n{:02}_d{}", p.cycles, p.dataset);
                    art.record(&format!("{stem}_sideband.csv"), &p.thermometry.0)?;
                    art.record(&format!("{stem}_ramsey.csv"), &p.ramsey.0)?;
                }
                art.write(&format!("{label}.csv"), &table)?;
                art.write(&format!("{label}_contrast.csv"), &series.data.to_csv())?;
                art.fit(&format!("{label}_decay_fit.csv"), &series.fit)?;
                let eps = (series.fit.params[1], series.fit.sigmas[1]);
                art.row(&label, "epsilon", eps.0, eps.1, "1");
                if let Some(d) = series.fit.derived("epsilon_exp") {
                    art.row(&label, "epsilon_exp", d.value, d.sigma, "1");
                }
                art.row(&label, "epsilon_model", 1.0 - exp.gap.cycle_factor(), f64::NAN, "1");
                if let Some(last) = series.points.iter().rev().find(|p| p.cycles == *max_cycles) {
                    art.row(&label, "nbar_final_true", last.nbar_truth, f64::NAN, "1");
                }
            }
            Stage::RepumpControl { pulses } => {
                let rc = exp.repump_control(*pulses, seed)?;
                art.record(&format!("{label}_control_record.csv"), &rc.control.0)?;
                art.record(&format!("{label}_repump_record.csv"), &rc.test.0)?;
                art.fit(&format!("{label}_control_fit.csv"), &rc.control.1)?;
                art.fit(&format!("{label}_repump_fit.csv"), &rc.test.1)?;
                let table = format!(
                    "pulses,model_ratio,model_loss,ratio,ratio_sigma\n{},{},{},{},{}\n",
                    rc.pulses,
                    rc.model_ratio,
                    1.0 - rc.model_ratio,
                    rc.ratio,
                    rc.ratio_sigma
                );
                art.write(&format!("{label}.csv"), &table)?;
                art.row(&label, "model_loss", 1.0 - rc.model_ratio, f64::NAN, "1");
                art.row(&label, "amplitude_ratio", rc.ratio, rc.ratio_sigma, "1");
            }
            Stage::RepumpScan => {
                let (rec, fit) = exp.repump_scan(seed)?;
                art.record(&format!("{label}_record.csv"), &rec)?;
                art.fit(&format!("{label}_fit.csv"), &fit)?;
                for (name, unit, scale) in [
                    ("alpha", "1/s", 1.0),
                    ("amplitude", "1", 1.0),
                    ("beta", "1/s", 1.0),
                    ("delta_q", "Hz", 1.0 / TAU),
                ] {
                    let v = fit.param(name).expect("repump parameter");
                    let s = fit.sigma(name).expect("repump parameter");
                    art.row(&label, name, v * scale, s * scale, unit);
                }
            }
        }
    }

    let mut summary = String::from("stage,quantity,value,sigma,unit\n");
    for r in &art.summary {
        let _ = writeln!(summary, "{},{},{},{},{}", r.stage, r.quantity, r.value, r.sigma, r.unit);
    }
    art.write("summary.csv", &summary)?;
    Ok(RunOutput {
        files: art.files,
        summary: art.summary,
    })
}
