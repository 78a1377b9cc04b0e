//! Axial normal modes of a two-ion crystal with unequal masses.
//!
//! Both ions carry the same charge and sit in the same harmonic axial
//! potential, so the spring constant `k_z = m1 * omega_z^2` is shared.
//! Linearizing the Coulomb repulsion about the equilibrium separation gives
//! the stiffness matrix `k_z * [[2, -1], [-1, 2]]`; the mass-weighted
//! dynamical matrix is diagonalized in closed form.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::units::{AMU, HBAR};

#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies {
    pub name: String,
    /// Atomic mass units.
    pub mass: f64,
    pub is_coolant: bool,
}

impl IonSpecies {
    pub fn new(name: impl Into<String>, mass: f64, is_coolant: bool) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::domain(format!("ion mass must be positive, got {mass}")));
        }
        Ok(IonSpecies {
            name: name.into(),
            mass,
            is_coolant,
        })
    }
}

/// Trap frequencies, all angular (rad/s). `omega_z` is the axial frequency
/// of a single ion of the coolant mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    pub omega_r: f64,
    pub omega_z: f64,
    /// Tesla. Carried for configuration echo only.
    pub b_field: f64,
}

impl TrapConfig {
    pub fn new(omega_r: f64, omega_z: f64, b_field: f64) -> Result<Self> {
        if !(omega_z > 0.0 && omega_r > omega_z) {
            return Err(Error::domain(format!(
                "linear trap requires omega_r > omega_z > 0 (got {omega_r}, {omega_z})"
            )));
        }
        Ok(TrapConfig {
            omega_r,
            omega_z,
            b_field,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    InPhase,
    OutOfPhase,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::InPhase, Mode::OutOfPhase];

    pub fn index(self) -> usize {
        match self {
            Mode::InPhase => 0,
            Mode::OutOfPhase => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::InPhase => "in",
            Mode::OutOfPhase => "out",
        }
    }

    pub fn from_label(s: &str) -> Option<Mode> {
        match s {
            "in" | "in_phase" => Some(Mode::InPhase),
            "out" | "out_of_phase" => Some(Mode::OutOfPhase),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStructure {
    /// Ion masses in amu, site order.
    pub masses: [f64; 2],
    pub omega_z: f64,
    /// Angular frequencies, `[in_phase, out_of_phase]`.
    pub frequencies: [f64; 2],
    /// `vectors[mode][ion]`, unit norm in mass-weighted coordinates. The
    /// first ion's component is non-negative for both modes.
    pub vectors: [[f64; 2]; 2],
}

impl ModeStructure {
    pub fn frequency(&self, mode: Mode) -> f64 {
        self.frequencies[mode.index()]
    }

    pub fn ratio(&self, mode: Mode) -> f64 {
        self.frequency(mode) / self.omega_z
    }

    pub fn ratios(&self) -> [f64; 2] {
        [self.ratio(Mode::InPhase), self.ratio(Mode::OutOfPhase)]
    }

    /// Lamb-Dicke parameter for every (ion, mode) pair: `table[ion][mode]`.
    pub fn lamb_dicke_table(&self, k_eff: f64) -> Result<[[f64; 2]; 2]> {
        let mut table = [[0.0; 2]; 2];
        for (ion, row) in table.iter_mut().enumerate() {
            for mode in Mode::ALL {
                row[mode.index()] = lamb_dicke(self, ion + 1, mode, k_eff)?;
            }
        }
        Ok(table)
    }
}

/// Solves the two-ion axial problem. `omega_z` belongs to a lone ion of
/// mass `m1`.
pub fn axial_modes(m1: f64, m2: f64, omega_z: f64) -> Result<ModeStructure> {
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::domain(format!("masses must be positive, got ({m1}, {m2})")));
    }
    if !(omega_z > 0.0) || !omega_z.is_finite() {
        return Err(Error::domain(format!("omega_z must be positive, got {omega_z}")));
    }
    let mu2 = m2 / m1;
    // dynamical matrix in units of omega_z^2
    let a = 2.0;
    let c = 2.0 / mu2;
    let b = -1.0 / mu2.sqrt();
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let eigenvalues = [half_trace - disc, half_trace + disc];

    let mut vectors = [[0.0; 2]; 2];
    for (k, &lam) in eigenvalues.iter().enumerate() {
        let v1 = [b, lam - a];
        let v2 = [lam - c, b];
        let n1 = v1[0].hypot(v1[1]);
        let n2 = v2[0].hypot(v2[1]);
        let (mut v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        v[0] /= n;
        v[1] /= n;
        if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
            v = [-v[0], -v[1]];
        }
        vectors[k] = v;
    }

    Ok(ModeStructure {
        masses: [m1, m2],
        omega_z,
        frequencies: [omega_z * eigenvalues[0].sqrt(), omega_z * eigenvalues[1].sqrt()],
        vectors,
    })
}

/// `k * sqrt(hbar / (2 m omega))` for a lone ion.
pub fn single_ion_lamb_dicke(mass_amu: f64, omega: f64, k_eff: f64) -> f64 {
    k_eff * (HBAR / (2.0 * mass_amu * AMU * omega)).sqrt()
}

/// Lamb-Dicke parameter of ion `ion_index` (1 or 2) in `mode`.
pub fn lamb_dicke(modes: &ModeStructure, ion_index: usize, mode: Mode, k_eff: f64) -> Result<f64> {
    if !(1..=2).contains(&ion_index) {
        return Err(Error::domain(format!("ion index must be 1 or 2, got {ion_index}")));
    }
    if !(k_eff > 0.0) {
        return Err(Error::domain(format!("k_eff must be positive, got {k_eff}")));
    }
    let ion = ion_index - 1;
    let b = modes.vectors[mode.index()][ion].abs();
    Ok(b * single_ion_lamb_dicke(modes.masses[ion], modes.frequency(mode), k_eff))
}

/// Magnitude of the difference wavevector of two beams of equal wavelength
/// crossing at `crossing_angle`.
pub fn raman_k_eff(wavelength: f64, crossing_angle: f64) -> f64 {
    2.0 * (TAU / wavelength) * (0.5 * crossing_angle).sin()
}
