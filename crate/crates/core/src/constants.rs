//! Atomic constants file: `key = <number> <unit>` lines, `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{parse_expect, Dimension};

/// The constants file shipped with the crate.
pub const BUILTIN: &str = include_str!("../data/calcium.consts");

#[derive(Debug, Clone, PartialEq)]
pub struct HyperfineComponent {
    pub f_s: u32,
    pub f_p: u32,
    /// Offset of the component from the coolant line, rad/s.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicConstants {
    /// P1/2 decay rate, rad/s.
    pub gamma: f64,
    pub wavelength: f64,
    /// Twice the memory-ion nuclear spin.
    pub two_nuclear_spin: i32,
    pub mass_coolant: f64,
    pub mass_memory: f64,
    pub components: Vec<HyperfineComponent>,
}

impl AtomicConstants {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN, "<builtin calcium.consts>").expect("shipped constants parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                origin: origin.to_string(),
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            entries.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }

        let get = |key: &str, dim: Dimension| -> Result<f64> {
            let (line, v) = entries.get(key).ok_or_else(|| Error::Parse {
                origin: origin.to_string(),
                line: 0,
                message: format!("missing key `{key}`"),
            })?;
            parse_expect(v, dim).map_err(|message| Error::Parse {
                origin: origin.to_string(),
                line: *line,
                message: format!("{key}: {message}"),
            })
        };

        let spin = get("nuclear_spin_memory", Dimension::Dimensionless)?;
        let two_nuclear_spin = (2.0 * spin).round() as i32;
        if two_nuclear_spin < 1 || (2.0 * spin - two_nuclear_spin as f64).abs() > 1e-9 {
            return Err(Error::domain(format!("nuclear spin must be a positive half-integer, got {spin}")));
        }

        let mut components = Vec::new();
        for key in entries.keys().filter(|k| k.starts_with("component_")) {
            let mut it = key["component_".len()..].split('_');
            let parse_f = |s: Option<&str>| s.and_then(|x| x.parse::<u32>().ok());
            let (f_s, f_p) = match (parse_f(it.next()), parse_f(it.next())) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parse {
                        origin: origin.to_string(),
                        line: entries[key].0,
                        message: format!("component key `{key}` must look like component_<F_S>_<F_P>"),
                    })
                }
            };
            components.push(HyperfineComponent {
                f_s,
                f_p,
                offset: get(key, Dimension::AngularFrequency)?,
            });
        }
        if components.is_empty() {
            return Err(Error::Parse {
                origin: origin.to_string(),
                line: 0,
                message: "no hyperfine components (component_<F_S>_<F_P>) given".into(),
            });
        }

        let gamma = get("gamma_p12", Dimension::AngularFrequency)?;
        if !(gamma > 0.0) {
            return Err(Error::domain("gamma_p12 must be positive"));
        }
        Ok(AtomicConstants {
            gamma,
            wavelength: get("wavelength_sp", Dimension::Length)?,
            two_nuclear_spin,
            mass_coolant: get("mass_coolant", Dimension::Mass)? / crate::units::AMU,
            mass_memory: get("mass_memory", Dimension::Mass)? / crate::units::AMU,
            components,
        })
    }

    /// Smallest isotope shift among the components, rad/s (positive).
    pub fn smallest_isotope_shift(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.offset.abs())
            .fold(f64::INFINITY, f64::min)
    }
}
