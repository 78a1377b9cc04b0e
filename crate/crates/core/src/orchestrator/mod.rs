//! Configuration files, the stage runner, budget sweeps and the self-check.

mod budget;
mod config;
mod experiment;
mod run;
mod selfcheck;

pub use budget::{budget_csv, budget_sweep, BudgetRow, SweepAxes};
pub use config::{
    BudgetSection, CoolingSection, ExperimentConfig, Precool, PumpingSection, RSigmaSource, RamanSection,
    RamseySection, RepumpScanSection, RepumpTruthSpec, ScatterSection, SpeciesSection, Stage, ThermometrySection,
    TrapSection,
};
pub use experiment::{derive_seed, par_map, ContrastSeries, Experiment, RepumpControl, SeriesPoint};
pub use run::{run, run_experiment, RunOutput, SummaryRow};
pub use selfcheck::{selfcheck, Check, SelfcheckReport};
