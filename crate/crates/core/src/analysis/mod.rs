//! Weighted nonlinear least squares for sideband spectra, Ramsey fringes,
//! contrast decay and repump scans.

pub mod lm;
pub mod models;
mod fits;
mod result;

pub use fits::{
    dominant_angular_frequency, fit_contrast_decay, fit_ramsey_fringe, fit_repump_scan, fit_sideband_scan,
    fit_sideband_scan_with, model_sigma, observed_sigma,
};
pub use lm::{gradient_mismatch, FitModel, LmOptions};
pub use result::{DecayData, Derived, FitResult};
