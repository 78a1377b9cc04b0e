use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use symcool::analysis::{
    fit_contrast_decay, fit_ramsey_fringe, fit_repump_scan, fit_sideband_scan, fit_sideband_scan_with, DecayData,
    FitResult,
};
use symcool::constants::AtomicConstants;
use symcool::measurement::ExperimentRecord;
use symcool::orchestrator::{budget_csv, budget_sweep, run, selfcheck, ExperimentConfig, SweepAxes};
use symcool::Error;

/// Sympathetic sideband cooling simulator: runs experiment configs, fits
/// scan records and tabulates gate-error budgets.
#[derive(Parser)]
#[command(name = "symcool", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the stage sequence of a config and write records, fits and a summary.
    Run {
        config: PathBuf,
        /// Output directory. Defaults to `runs/<run name>`.
        #[arg(long, env = "SYMCOOL_OUT")]
        out: Option<PathBuf>,
        /// Replace the seed given in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep the gate-error budget over the config's [budget] axes.
    Budget {
        config: PathBuf,
        /// Axis override such as `eta=0.05,0.1;N=10`. Axes: eta, nbar, N, eps. Repeatable.
        #[arg(long)]
        sweep: Vec<String>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in oracle checks; exits nonzero if any fails.
    Selfcheck {
        /// Atomic constants file to check instead of the built-in one.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Fit a record CSV written by `run` (or a contrast table for `decay`).
    Fit {
        record: PathBuf,
        #[arg(long, value_enum)]
        model: FitKind,
        /// Sideband probe pulse length in microseconds, if the record lacks it.
        #[arg(long)]
        pulse_us: Option<f64>,
        /// Also write the fit as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Sideband,
    Ramsey,
    Repump,
    Decay,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, seed } => cmd_run(&config, out, seed),
        Command::Budget { config, sweep, out } => cmd_budget(&config, &sweep, out.as_deref()),
        Command::Selfcheck { constants } => cmd_selfcheck(constants.as_deref()),
        Command::Fit {
            record,
            model,
            pulse_us,
            out,
        } => cmd_fit(&record, model, pulse_us, out.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> symcool::Result<ExitCode> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let dir = out.unwrap_or_else(|| Path::new("runs").join(&config.name));
    let output = run(&config, &dir)?;
    print!("{}", output.summary_table());
    println!("wrote {} files to {}", output.files.len(), dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_budget(path: &Path, sweeps: &[String], out: Option<&Path>) -> symcool::Result<ExitCode> {
    let config = ExperimentConfig::load(path)?;
    let b = &config.budget;
    let mut axes = SweepAxes {
        eta: b.eta.clone(),
        nbar: b.nbar.clone(),
        cycles: b.cycles.clone(),
        eps: b.eps.clone(),
    };
    for s in sweeps {
        axes.apply(s)?;
    }
    let rows = budget_sweep(&axes)?;
    let meta = vec![
        ("config".to_string(), path.display().to_string()),
        ("config_hash".to_string(), config.hash.clone()),
        ("seed".to_string(), config.seed.to_string()),
    ];
    let table = budget_csv(&rows, &meta);
    match out {
        Some(p) => std::fs::write(p, table).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        })?,
        None => print!("{table}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_selfcheck(constants: Option<&Path>) -> symcool::Result<ExitCode> {
    let c = match constants {
        Some(p) => AtomicConstants::load(p)?,
        None => AtomicConstants::builtin(),
    };
    let r = selfcheck(&c);
    print!("{}", r.render());
    Ok(if r.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_fit(path: &Path, kind: FitKind, pulse_us: Option<f64>, out: Option<&Path>) -> symcool::Result<ExitCode> {
    let (fit, meta): (FitResult, Vec<(String, String)>) = match kind {
        FitKind::Decay => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            let data = DecayData::from_csv(&text, &path.display().to_string())?;
            (fit_contrast_decay(&data)?, data.metadata.clone())
        }
        _ => {
            let rec = ExperimentRecord::read(path)?;
            let fit = match kind {
                FitKind::Sideband => match pulse_us {
                    Some(t) => fit_sideband_scan_with(&rec, t * 1e-6)?,
                    None => fit_sideband_scan(&rec)?,
                },
                FitKind::Ramsey => fit_ramsey_fringe(&rec)?,
                FitKind::Repump => fit_repump_scan(&rec)?,
                FitKind::Decay => unreachable!(),
            };
            (fit, rec.metadata.clone())
        }
    };
    print!("{}", fit.report());
    if let Some(p) = out {
        let mut meta = meta;
        meta.push(("source".to_string(), path.display().to_string()));
        fit.write_csv(p, &meta)?;
    }
    Ok(ExitCode::SUCCESS)
}
