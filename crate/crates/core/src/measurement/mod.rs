//! Finite-shot synthetic data: detection imperfections, seeded binomial
//! sampling and the on-disk record format.

mod detection;
mod record;
mod synth;

pub use detection::{sample_point, Channel, DetectionModel};
pub use record::{ExperimentRecord, ScanPoint};
pub use synth::{
    sideband_grid, synth_ramsey_scan, synth_repump_scan, synth_scan, synth_sideband_scan, RamseyTruth,
    RepumpTruth, SidebandTruth,
};
