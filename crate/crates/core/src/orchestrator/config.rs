//! Experiment description files: `[section]` headers, `key = value` lines,
//! `#` comments. Real-valued quantities carry a unit suffix (`1` for pure
//! numbers); counts are bare integers. `[sequence]` holds an ordered list of
//! `stage = ...` lines.

use std::collections::HashSet;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::crystal::Mode;
use crate::error::{ConfigIssue, Error, Result};
use crate::measurement::DetectionModel;
use crate::qubit::PulseErrors;
use crate::units::{parse_expect, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precool {
    Doppler,
    Raman,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    /// Reset both modes to the thermal state left by a pre-cooling method.
    Precool(Precool),
    /// Interleaved sideband cooling cycles on the listed modes.
    Cool { cycles: usize, modes: Vec<Mode> },
    /// Sideband spectra of the listed modes and their temperature fits.
    Thermometry { modes: Vec<Mode> },
    /// Temperature and Ramsey contrast against the number of cooling cycles.
    CoolingSeries { max_cycles: usize, datasets: usize },
    /// Ramsey fringe with repump pulses only, against a control.
    RepumpControl { pulses: usize },
    /// Upper-manifold population against repump duration.
    RepumpScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RSigmaSource {
    /// `h (Γ / 2Δ_I)²` per photon.
    Scattering,
    /// `2 α τ_σ` with α from the pumping model.
    Pumping,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepumpTruthSpec {
    Empirical {
        alpha: f64,
        amplitude: f64,
        beta: f64,
        delta_q: f64,
    },
    RateEquations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapSection {
    pub omega_r: f64,
    pub omega_z: f64,
    pub b_field: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSection {
    pub coolant_name: String,
    pub memory_name: String,
    /// Atomic mass units; `None` takes the constants file value.
    pub coolant_mass: Option<f64>,
    pub memory_mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamanSection {
    pub detuning: f64,
    pub crossing_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingSection {
    pub pulse_duration: f64,
    pub pulse_target_n: u32,
    pub retune_schedule: Vec<u32>,
    pub repump_duration: f64,
    pub photons_per_repump: f64,
    pub eta_recoil: f64,
    pub heating_rate: f64,
    pub cycle_wall_time: f64,
    pub idealized: bool,
    pub doppler_nbar: f64,
    pub raman_nbar: f64,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSection {
    /// Mode whose coolant Lamb-Dicke parameter sets the sideband scattering.
    pub mode: Mode,
    pub g_factor: f64,
    /// `None` derives h from the pumping model's angular factors.
    pub h_factor: Option<f64>,
    pub elastic_fraction: f64,
    pub r_sigma: RSigmaSource,
    /// Per-cycle contrast loss to calibrate the off-resonant Raman term to.
    pub eps_total: f64,
    /// Explicit off-resonant Raman loss; overrides the calibration.
    pub eps_raman: Option<f64>,
    pub track_leakage: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpingSection {
    pub intensity: f64,
    pub laser_detuning: f64,
    pub elastic_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermometrySection {
    pub pulse_duration: f64,
    pub half_span: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamseySection {
    pub phase_points: usize,
    pub pulse_errors: PulseErrors,
    pub detuning: f64,
    pub gap_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepumpScanSection {
    pub max_duration: f64,
    pub points: usize,
    pub truth: RepumpTruthSpec,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BudgetSection {
    pub eta: Vec<f64>,
    pub nbar: Vec<f64>,
    pub cycles: Vec<f64>,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub constants: Option<PathBuf>,
    pub trap: TrapSection,
    pub species: SpeciesSection,
    pub raman: RamanSection,
    pub cooling: CoolingSection,
    pub scatter: ScatterSection,
    pub pumping: PumpingSection,
    pub detection: DetectionModel,
    pub thermometry: ThermometrySection,
    pub ramsey: RamseySection,
    pub repump_scan: RepumpScanSection,
    pub budget: BudgetSection,
    pub sequence: Vec<Stage>,
    /// SHA-256 of the file text, hex.
    pub hash: String,
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    name: String,
    entries: Vec<Entry>,
}

fn parse_sections(text: &str, origin: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| Error::Parse {
            origin: origin.to_string(),
            line: i + 1,
            message: message.to_string(),
        };
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err("section header must end with ']'"))?
                .trim();
            if sections.iter().any(|s| s.name == name) {
                return Err(err(&format!("section [{name}] appears twice")));
            }
            sections.push(Section {
                name: name.to_string(),
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
        let section = sections.last_mut().ok_or_else(|| err("entry before any [section]"))?;
        section.entries.push(Entry {
            key: k.trim().to_string(),
            value: v.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(sections)
}

const SECTIONS: [&str; 13] = [
    "run",
    "trap",
    "species",
    "raman",
    "cooling",
    "scatter",
    "pumping",
    "detection",
    "thermometry",
    "ramsey",
    "repump_scan",
    "budget",
    "sequence",
];

const REQUIRED: [&str; 3] = ["run", "trap", "sequence"];

/// Typed field access that records every problem instead of stopping at
/// the first.
struct Reader<'a> {
    sections: &'a [Section],
    issues: Vec<ConfigIssue>,
    used: HashSet<(String, String)>,
}

impl<'a> Reader<'a> {
    fn issue(&mut self, field: String, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            field,
            message: message.into(),
        });
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        self.used.insert((section.to_string(), key.to_string()));
        let s = self.sections.iter().find(|s| s.name == section)?;
        let mut found = s.entries.iter().filter(|e| e.key == key);
        let first = found.next()?;
        if let Some(dup) = found.next() {
            self.issue(format!("{section}.{key}"), format!("given twice (line {})", dup.line));
        }
        Some((first.value.clone(), first.line))
    }

    fn quantity(&mut self, section: &str, key: &str, dim: Dimension, default: Option<f64>) -> f64 {
        let field = format!("{section}.{key}");
        match self.raw(section, key) {
            Some((v, line)) => match parse_expect(&v, dim) {
                Ok(x) if x.is_finite() => x,
                Ok(_) => {
                    self.issue(field, format!("line {line}: value is not finite"));
                    f64::NAN
                }
                Err(e) => {
                    self.issue(field, format!("line {line}: {e}"));
                    f64::NAN
                }
            },
            None => default.unwrap_or_else(|| {
                self.issue(field, format!("required {dim} value is missing"));
                f64::NAN
            }),
        }
    }

    /// A quantity that must also satisfy `ok`.
    fn checked(
        &mut self,
        section: &str,
        key: &str,
        dim: Dimension,
        default: Option<f64>,
        ok: fn(f64) -> bool,
        rule: &str,
    ) -> f64 {
        let v = self.quantity(section, key, dim, default);
        if !v.is_nan() && !ok(v) {
            self.issue(format!("{section}.{key}"), format!("{v} violates: {rule}"));
        }
        v
    }

    fn optional_quantity(&mut self, section: &str, key: &str, dim: Dimension, auto: &str) -> Option<f64> {
        match self.raw(section, key) {
            Some((v, _)) if v == auto => None,
            Some(_) => Some(self.quantity(section, key, dim, None)),
            None => None,
        }
    }

    fn integer(&mut self, section: &str, key: &str, default: Option<u64>) -> u64 {
        let field = format!("{section}.{key}");
        match self.raw(section, key) {
            Some((v, line)) => v.parse().unwrap_or_else(|_| {
                self.issue(field, format!("line {line}: `{v}` is not a non-negative integer"));
                0
            }),
            None => default.unwrap_or_else(|| {
                self.issue(field, "required integer is missing");
                0
            }),
        }
    }

    fn integers(&mut self, section: &str, key: &str) -> Vec<u32> {
        let field = format!("{section}.{key}");
        let Some((v, line)) = self.raw(section, key) else { return Vec::new() };
        let parsed: std::result::Result<Vec<u32>, _> = v.split_whitespace().map(str::parse).collect();
        parsed.unwrap_or_else(|_| {
            self.issue(field, format!("line {line}: expected space-separated integers"));
            Vec::new()
        })
    }

    /// `v1, v2, ... <unit>`: comma-separated numbers sharing one unit.
    fn quantities(&mut self, section: &str, key: &str, dim: Dimension) -> Vec<f64> {
        let field = format!("{section}.{key}");
        let Some((v, line)) = self.raw(section, key) else { return Vec::new() };
        let Some((nums, unit)) = v.trim().rsplit_once(char::is_whitespace) else {
            self.issue(field, format!("line {line}: list needs a unit suffix"));
            return Vec::new();
        };
        let mut out = Vec::new();
        for item in nums.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match parse_expect(&format!("{item} {unit}"), dim) {
                Ok(x) => out.push(x),
                Err(e) => {
                    self.issue(field, format!("line {line}: {e}"));
                    return Vec::new();
                }
            }
        }
        out
    }

    /// Comma-separated counts.
    fn counts(&mut self, section: &str, key: &str) -> Vec<f64> {
        let field = format!("{section}.{key}");
        let Some((v, line)) = self.raw(section, key) else { return Vec::new() };
        let parsed: std::result::Result<Vec<u64>, _> = v.split(',').map(|s| s.trim().parse::<u64>()).collect();
        match parsed {
            Ok(c) => c.into_iter().map(|c| c as f64).collect(),
            Err(_) => {
                self.issue(field, format!("line {line}: expected comma-separated integers"));
                Vec::new()
            }
        }
    }

    fn flag(&mut self, section: &str, key: &str, default: bool) -> bool {
        match self.raw(section, key) {
            Some((v, line)) => match v.as_str() {
                "true" | "yes" | "on" => true,
                "false" | "no" | "off" => false,
                _ => {
                    self.issue(format!("{section}.{key}"), format!("line {line}: expected true or false"));
                    default
                }
            },
            None => default,
        }
    }

    fn word(&mut self, section: &str, key: &str, default: &str, allowed: &[&str]) -> String {
        match self.raw(section, key) {
            Some((v, line)) if allowed.contains(&v.as_str()) => {
                let _ = line;
                v
            }
            Some((v, line)) => {
                self.issue(
                    format!("{section}.{key}"),
                    format!("line {line}: `{v}` is not one of {}", allowed.join(", ")),
                );
                default.to_string()
            }
            None => default.to_string(),
        }
    }

    fn text(&mut self, section: &str, key: &str, default: &str) -> String {
        self.raw(section, key).map(|(v, _)| v).unwrap_or_else(|| default.to_string())
    }
}

fn parse_modes(words: &[&str]) -> std::result::Result<Vec<Mode>, String> {
    if words.is_empty() || words == ["both"] {
        return Ok(Mode::ALL.to_vec());
    }
    words
        .iter()
        .map(|w| Mode::from_label(w).ok_or_else(|| format!("unknown mode `{w}` (in, out or both)")))
        .collect()
}

fn parse_stage(text: &str) -> std::result::Result<Stage, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let count = |i: usize, what: &str| -> std::result::Result<usize, String> {
        words
            .get(i)
            .ok_or_else(|| format!("missing {what}"))?
            .parse::<usize>()
            .map_err(|_| format!("{what} must be a non-negative integer"))
    };
    match words.first().copied() {
        Some("precool") => match words.get(1).copied() {
            Some("doppler") => Ok(Stage::Precool(Precool::Doppler)),
            Some("raman") | None => Ok(Stage::Precool(Precool::Raman)),
            Some(w) => Err(format!("unknown pre-cooling `{w}` (doppler or raman)")),
        },
        Some("cool") => Ok(Stage::Cool {
            cycles: count(1, "cycle count")?,
            modes: parse_modes(&words[2.min(words.len())..])?,
        }),
        Some("thermometry") => Ok(Stage::Thermometry {
            modes: parse_modes(&words[1..])?,
        }),
        Some("cooling_series") => {
            let max_cycles = count(1, "maximum cycle count")?;
            let datasets = if words.len() > 2 { count(2, "data set count")? } else { 1 };
            if datasets == 0 {
                return Err("data set count must be at least 1".into());
            }
            Ok(Stage::CoolingSeries { max_cycles, datasets })
        }
        Some("repump_control") => Ok(Stage::RepumpControl {
            pulses: count(1, "pulse count")?,
        }),
        Some("repump_scan") => Ok(Stage::RepumpScan),
        Some(other) => Err(format!("unknown stage `{other}`")),
        None => Err("empty stage".into()),
    }
}

fn nonneg(v: f64) -> bool {
    v >= 0.0
}
fn positive(v: f64) -> bool {
    v > 0.0
}
fn probability(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}
fn below_one(v: f64) -> bool {
    (0.0..1.0).contains(&v)
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        use Dimension::*;
        let sections = parse_sections(text, origin)?;
        let mut r = Reader {
            sections: &sections,
            issues: Vec::new(),
            used: HashSet::new(),
        };
        for s in &sections {
            if !SECTIONS.contains(&s.name.as_str()) {
                r.issue(s.name.clone(), "unknown section");
            }
        }
        for req in REQUIRED {
            if !sections.iter().any(|s| s.name == req) {
                r.issue(req.to_string(), "required section is missing");
            }
        }

        let name = r.text("run", "name", "experiment");
        let seed = r.integer("run", "seed", None);
        let constants = r.raw("run", "constants").map(|(v, _)| PathBuf::from(v));

        let trap = TrapSection {
            omega_r: r.checked("trap", "omega_r", AngularFrequency, None, positive, "> 0"),
            omega_z: r.checked("trap", "omega_z", AngularFrequency, None, positive, "> 0"),
            b_field: r.checked("trap", "b_field", MagneticField, Some(0.0), nonneg, ">= 0"),
        };
        if trap.omega_r <= trap.omega_z {
            r.issue("trap.omega_r".into(), "must exceed trap.omega_z for a linear crystal");
        }

        let species = SpeciesSection {
            coolant_name: r.text("species", "coolant", "40Ca+"),
            memory_name: r.text("species", "memory", "43Ca+"),
            coolant_mass: r.optional_quantity("species", "coolant_mass", Mass, "auto").map(|m| m / crate::units::AMU),
            memory_mass: r.optional_quantity("species", "memory_mass", Mass, "auto").map(|m| m / crate::units::AMU),
        };
        for (key, m) in [("coolant_mass", species.coolant_mass), ("memory_mass", species.memory_mass)] {
            if m.is_some_and(|m| !(m > 0.0)) {
                r.issue(format!("species.{key}"), "must be > 0");
            }
        }

        let raman = RamanSection {
            detuning: r.checked("raman", "detuning", AngularFrequency, Some(std::f64::consts::TAU * 30e9), positive, "> 0"),
            crossing_angle: r.checked("raman", "crossing_angle", Angle, Some(60f64.to_radians()), positive, "> 0"),
        };

        let cooling = CoolingSection {
            pulse_duration: r.checked("cooling", "pulse_duration", Time, Some(15e-6), positive, "> 0"),
            pulse_target_n: r.integer("cooling", "pulse_target_n", Some(1)) as u32,
            retune_schedule: r.integers("cooling", "retune_schedule"),
            repump_duration: r.checked("cooling", "repump_duration", Time, Some(10e-6), nonneg, ">= 0"),
            photons_per_repump: r.checked("cooling", "photons_per_repump", Dimensionless, Some(3.0), nonneg, ">= 0"),
            eta_recoil: r.checked("cooling", "eta_recoil", Dimensionless, Some(0.1), nonneg, ">= 0"),
            heating_rate: r.checked("cooling", "heating_rate", Rate, Some(0.0), nonneg, ">= 0"),
            cycle_wall_time: r.checked("cooling", "cycle_wall_time", Time, Some(0.0), nonneg, ">= 0"),
            idealized: r.flag("cooling", "idealized", false),
            doppler_nbar: r.checked("cooling", "doppler_nbar", Dimensionless, Some(12.0), nonneg, ">= 0"),
            raman_nbar: r.checked("cooling", "raman_nbar", Dimensionless, Some(0.6), nonneg, ">= 0"),
            n_max: r.integer("cooling", "n_max", Some(crate::motion::DEFAULT_N_MAX as u64)) as usize,
        };
        if cooling.pulse_target_n == 0 || cooling.retune_schedule.contains(&0) {
            r.issue("cooling.pulse_target_n".into(), "pulse targets must be >= 1");
        }
        if cooling.n_max < 2 {
            r.issue("cooling.n_max".into(), "must be at least 2");
        }

        let scatter_mode = r.word("scatter", "mode", "out", &["in", "out"]);
        let r_sigma = r.word("scatter", "r_sigma", "scattering", &["scattering", "pumping"]);
        let scatter = ScatterSection {
            mode: Mode::from_label(&scatter_mode).unwrap_or(Mode::OutOfPhase),
            g_factor: r.checked("scatter", "g_factor", Dimensionless, Some(1.0), positive, "> 0"),
            h_factor: r.optional_quantity("scatter", "h_factor", Dimensionless, "auto"),
            elastic_fraction: r.checked("scatter", "elastic_fraction", Dimensionless, Some(0.0), probability, "in [0, 1]"),
            r_sigma: if r_sigma == "pumping" {
                RSigmaSource::Pumping
            } else {
                RSigmaSource::Scattering
            },
            eps_total: r.checked("scatter", "eps_total", Dimensionless, Some(0.033), below_one, "in [0, 1)"),
            eps_raman: r.optional_quantity("scatter", "eps_raman", Dimensionless, "auto"),
            track_leakage: r.flag("scatter", "track_leakage", false),
        };
        if scatter.h_factor.is_some_and(|h| !(h > 0.0)) {
            r.issue("scatter.h_factor".into(), "must be > 0 or auto");
        }
        if scatter.eps_raman.is_some_and(|e| !below_one(e)) {
            r.issue("scatter.eps_raman".into(), "must lie in [0, 1) or be auto");
        }

        let pumping = PumpingSection {
            intensity: r.checked("pumping", "intensity", Intensity, Some(10.6), nonneg, ">= 0"),
            laser_detuning: r.quantity("pumping", "laser_detuning", AngularFrequency, Some(0.0)),
            elastic_fraction: r.checked("pumping", "elastic_fraction", Dimensionless, Some(0.0), probability, "in [0, 1]"),
        };

        let defaults = DetectionModel::default();
        let detection = DetectionModel {
            p_shelve_down: r.checked("detection", "p_shelve_down", Dimensionless, Some(defaults.p_shelve_down), probability, "in [0, 1]"),
            p_shelve_up: r.checked("detection", "p_shelve_up", Dimensionless, Some(defaults.p_shelve_up), probability, "in [0, 1]"),
            shots_per_point: r.integer("detection", "shots", Some(defaults.shots_per_point)),
            prep_clock_fraction: r.checked("detection", "prep_clock_fraction", Dimensionless, Some(defaults.prep_clock_fraction), probability, "in [0, 1]"),
            coolant_true_positive: r.checked("detection", "coolant_true_positive", Dimensionless, Some(1.0), probability, "in [0, 1]"),
            coolant_false_positive: r.checked("detection", "coolant_false_positive", Dimensionless, Some(0.0), probability, "in [0, 1]"),
            noiseless: r.flag("detection", "noiseless", false),
        };
        if detection.shots_per_point == 0 {
            r.issue("detection.shots".into(), "must be at least 1");
        }

        let thermometry = ThermometrySection {
            pulse_duration: r.checked("thermometry", "pulse_duration", Time, Some(24e-6), positive, "> 0"),
            half_span: r.checked("thermometry", "half_span", AngularFrequency, Some(std::f64::consts::TAU * 60e3), positive, "> 0"),
            points: r.integer("thermometry", "points", Some(20)) as usize,
        };
        if thermometry.points < 4 {
            r.issue("thermometry.points".into(), "need at least 4 points per sideband");
        }

        let ramsey = RamseySection {
            phase_points: r.integer("ramsey", "phase_points", Some(20)) as usize,
            pulse_errors: PulseErrors {
                first: r.quantity("ramsey", "pulse_error_first", Dimensionless, Some(0.0)),
                second: r.quantity("ramsey", "pulse_error_second", Dimensionless, Some(0.0)),
            },
            detuning: r.quantity("ramsey", "detuning", AngularFrequency, Some(0.0)),
            gap_time: r.checked("ramsey", "gap_time", Time, Some(0.0), nonneg, ">= 0"),
        };
        if ramsey.phase_points < 4 {
            r.issue("ramsey.phase_points".into(), "need at least 4 phase points");
        }

        let truth = r.word("repump_scan", "truth", "rate_equations", &["rate_equations", "empirical"]);
        let repump_scan = RepumpScanSection {
            max_duration: r.checked("repump_scan", "max_duration", Time, Some(5e-3), positive, "> 0"),
            points: r.integer("repump_scan", "points", Some(50)) as usize,
            truth: if truth == "empirical" {
                RepumpTruthSpec::Empirical {
                    alpha: r.checked("repump_scan", "alpha", Rate, None, nonneg, ">= 0"),
                    amplitude: r.quantity("repump_scan", "amplitude", Dimensionless, None),
                    beta: r.checked("repump_scan", "beta", Rate, None, nonneg, ">= 0"),
                    delta_q: r.quantity("repump_scan", "delta_q", AngularFrequency, None),
                }
            } else {
                RepumpTruthSpec::RateEquations
            },
        };
        if repump_scan.points < 5 {
            r.issue("repump_scan.points".into(), "need at least 5 points");
        }

        let budget = BudgetSection {
            eta: r.quantities("budget", "eta", Dimensionless),
            nbar: r.quantities("budget", "nbar", Dimensionless),
            cycles: r.counts("budget", "cycles"),
            eps: r.quantities("budget", "eps", Dimensionless),
        };

        let mut sequence = Vec::new();
        if let Some(s) = sections.iter().find(|s| s.name == "sequence") {
            for e in &s.entries {
                r.used.insert(("sequence".into(), e.key.clone()));
                if e.key != "stage" {
                    r.issue(format!("sequence.{}", e.key), "only `stage = ...` entries are allowed");
                    continue;
                }
                match parse_stage(&e.value) {
                    Ok(st) => sequence.push(st),
                    Err(m) => r.issue(format!("sequence.stage[{}]", sequence.len()), format!("line {}: {m}", e.line)),
                }
            }
            if sequence.is_empty() {
                r.issue("sequence".into(), "no stages declared");
            }
        }

        for s in &sections {
            if !SECTIONS.contains(&s.name.as_str()) {
                continue;
            }
            for e in &s.entries {
                if !r.used.contains(&(s.name.clone(), e.key.clone())) {
                    r.issue(format!("{}.{}", s.name, e.key), format!("line {}: unknown key", e.line));
                }
            }
        }

        if !r.issues.is_empty() {
            return Err(Error::Config(r.issues));
        }
        Ok(ExperimentConfig {
            name,
            seed,
            constants,
            trap,
            species,
            raman,
            cooling,
            scatter,
            pumping,
            detection,
            thermometry,
            ramsey,
            repump_scan,
            budget,
            sequence,
            hash: hex::encode(Sha256::digest(text.as_bytes())),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        if let (Some(c), Some(dir)) = (&cfg.constants, path.parent()) {
            if c.is_relative() {
                cfg.constants = Some(dir.join(c));
            }
        }
        Ok(cfg)
    }
}
