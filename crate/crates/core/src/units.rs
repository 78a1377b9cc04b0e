//! Physical constants and the `<number> <unit>` quantity syntax used by
//! configuration and constants files.
//!
//! Every quantity is normalized to SI on parse. Frequencies written in
//! Hz/kHz/MHz/GHz are cyclic and are converted to angular frequency
//! (rad/s); `rad/s` is taken as-is. Rates (`1/s`) are never scaled by 2π.

use std::f64::consts::{PI, TAU};
use std::fmt;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const AMU: f64 = 1.660_539_066_60e-27;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Dimensionless,
    AngularFrequency,
    Rate,
    Time,
    Length,
    Mass,
    Intensity,
    MagneticField,
    Angle,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Dimensionless => "dimensionless (unit `1`)",
            Dimension::AngularFrequency => "frequency (Hz, kHz, MHz, GHz or rad/s)",
            Dimension::Rate => "rate (1/s)",
            Dimension::Time => "time (s, ms, us, ns)",
            Dimension::Length => "length (m, mm, um, nm)",
            Dimension::Mass => "mass (amu or kg)",
            Dimension::Intensity => "intensity (W/m2 or mW/cm2)",
            Dimension::MagneticField => "magnetic field (T, mT, G)",
            Dimension::Angle => "angle (rad, mrad, deg, turn)",
        };
        f.write_str(s)
    }
}

fn unit_scale(unit: &str) -> Option<(Dimension, f64)> {
    use Dimension::*;
    let entry = match unit {
        "1" => (Dimensionless, 1.0),
        "Hz" => (AngularFrequency, TAU),
        "kHz" => (AngularFrequency, TAU * 1e3),
        "MHz" => (AngularFrequency, TAU * 1e6),
        "GHz" => (AngularFrequency, TAU * 1e9),
        "rad/s" => (AngularFrequency, 1.0),
        "1/s" | "s^-1" => (Rate, 1.0),
        "s" => (Time, 1.0),
        "ms" => (Time, 1e-3),
        "us" | "μs" => (Time, 1e-6),
        "ns" => (Time, 1e-9),
        "m" => (Length, 1.0),
        "mm" => (Length, 1e-3),
        "um" | "μm" => (Length, 1e-6),
        "nm" => (Length, 1e-9),
        "amu" | "u" => (Mass, AMU),
        "kg" => (Mass, 1.0),
        "W/m2" | "W/m^2" => (Intensity, 1.0),
        "mW/cm2" | "mW/cm^2" => (Intensity, 10.0),
        "T" => (MagneticField, 1.0),
        "mT" => (MagneticField, 1e-3),
        "G" => (MagneticField, 1e-4),
        "rad" => (Angle, 1.0),
        "mrad" => (Angle, 1e-3),
        "deg" => (Angle, PI / 180.0),
        "turn" => (Angle, TAU),
        _ => return None,
    };
    Some(entry)
}

/// Parses `"<number> <unit>"` into an SI value and its dimension.
pub fn parse_quantity(text: &str) -> std::result::Result<(f64, Dimension), String> {
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or_else(|| "empty value".to_string())?;
    let value: f64 = number
        .parse()
        .map_err(|_| format!("`{number}` is not a number"))?;
    let unit = parts
        .next()
        .ok_or_else(|| format!("`{text}` is missing a unit suffix"))?;
    if let Some(extra) = parts.next() {
        return Err(format!("unexpected trailing token `{extra}`"));
    }
    let (dim, scale) = unit_scale(unit).ok_or_else(|| format!("unknown unit `{unit}`"))?;
    Ok((value * scale, dim))
}

/// Parses a quantity and checks it has the expected dimension.
pub fn parse_expect(text: &str, want: Dimension) -> std::result::Result<f64, String> {
    let (v, dim) = parse_quantity(text)?;
    if dim != want {
        return Err(format!("expected {want}, got {dim}"));
    }
    Ok(v)
}
