//! Memory-qubit coherence: scattering estimates, light shifts, the optical
//! pumping model, Ramsey readout and the gate-error budget.

pub mod angular;
pub mod coherence;
pub mod pumping;
pub mod scatter;

pub use coherence::{
    apply_cooling_decoherence, apply_repump_only, ramsey_sequence, GapContext, GapOp, PulseErrors,
    QubitCoherence, RamseyFringe,
};
pub use pumping::{pumping_scan, repump_curve, Polarization, PumpingModel, PumpingScan, Sublevel};
pub use scatter::{
    addressing_crosstalk, gate_error_budget, light_shift_phase, repump_scatter_rate, scattering_per_cycle,
    GateErrorBudget, ScatterBudget, ScatterParams,
};
