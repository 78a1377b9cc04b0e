use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub x: f64,
    /// Integer for sampled data; the expected count for noiseless records.
    pub successes: f64,
    pub shots: u64,
}

impl ScanPoint {
    pub fn fraction(&self) -> f64 {
        self.successes / self.shots as f64
    }
}

/// One scan: points plus the metadata needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scan_variable: String,
    pub unit: String,
    pub points: Vec<ScanPoint>,
    pub seed: u64,
    /// Free-form `key=value` pairs, kept in insertion order.
    pub metadata: Vec<(String, String)>,
}

const RESERVED: [&str; 3] = ["scan_variable", "unit", "seed"];

impl ExperimentRecord {
    pub fn new(scan_variable: &str, unit: &str, seed: u64) -> Self {
        ExperimentRecord {
            scan_variable: scan_variable.to_string(),
            unit: unit.to_string(),
            points: Vec::new(),
            seed,
            metadata: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if p.shots == 0 || !(0.0..=p.shots as f64).contains(&p.successes) || !p.x.is_finite() {
                return Err(Error::domain(format!(
                    "point {i}: successes {} outside [0, {}] or bad x",
                    p.successes, p.shots
                )));
            }
        }
        for (k, v) in &self.metadata {
            if k.contains(['=', '\n']) || v.contains('\n') || RESERVED.contains(&k.as_str()) {
                return Err(Error::domain(format!("metadata entry {k:?} cannot be serialized")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        let _ = writeln!(out, "# scan_variable={}", self.scan_variable);
        let _ = writeln!(out, "# unit={}", self.unit);
        let _ = writeln!(out, "# seed={}", self.seed);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "successes", "shots"])?;
        for p in &self.points {
            w.write_record([p.x.to_string(), p.successes.to_string(), p.shots.to_string()])?;
        }
        let body = w.into_inner().map_err(|e| Error::domain(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            origin: origin.to_string(),
            line,
            message,
        };
        let mut rec = ExperimentRecord::new("x", "", 0);
        let mut body_start = 0;
        let mut header_lines = 0;
        for line in text.lines() {
            let Some(meta) = line.strip_prefix('#') else { break };
            header_lines += 1;
            body_start += line.len() + 1;
            let Some((k, v)) = meta.trim_start().split_once('=') else {
                return Err(parse_err(header_lines, "metadata line without '='".into()));
            };
            match k {
                "scan_variable" => rec.scan_variable = v.to_string(),
                "unit" => rec.unit = v.to_string(),
                "seed" => {
                    rec.seed = v
                        .parse()
                        .map_err(|_| parse_err(header_lines, format!("seed {v:?} is not an integer")))?
                }
                _ => rec.metadata.push((k.to_string(), v.to_string())),
            }
        }
        let body = text.get(body_start.min(text.len())..).unwrap_or("");
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "successes", "shots"] {
            return Err(parse_err(header_lines + 1, "expected columns x,successes,shots".into()));
        }
        for (i, row) in r.records().enumerate() {
            let row = row?;
            let line = header_lines + 2 + i;
            let field = |j: usize| row.get(j).unwrap_or("");
            let x: f64 = field(0).parse().map_err(|_| parse_err(line, "bad x".into()))?;
            let successes: f64 = field(1).parse().map_err(|_| parse_err(line, "bad successes".into()))?;
            let shots: u64 = field(2).parse().map_err(|_| parse_err(line, "bad shots".into()))?;
            rec.points.push(ScanPoint { x, successes, shots });
        }
        rec.validate()?;
        Ok(rec)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, &path.display().to_string())
    }
}
