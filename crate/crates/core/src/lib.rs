//! Simulation and analysis of sympathetic Raman sideband cooling in a
//! two-isotope trapped-ion crystal, with the memory qubit's Ramsey
//! coherence tracked through every cooling cycle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod cooling;
pub mod crystal;
pub mod error;
pub mod measurement;
pub mod motion;
pub mod orchestrator;
pub mod qubit;
pub mod units;

pub use error::{Error, Result};
