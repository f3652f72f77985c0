//! Records produced by the verification scans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One evaluated inequality `lhs <= C * envelope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub params: BTreeMap<String, f64>,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, envelope: f64) -> Self {
        Self { name: name.into(), lhs, envelope, ratio: lhs / envelope, params: BTreeMap::new() }
    }

    /// Builds a check from logarithms, for quantities outside the double range.
    pub fn from_ln(name: impl Into<String>, ln_lhs: f64, ln_envelope: f64) -> Self {
        Self {
            name: name.into(),
            lhs: ln_lhs.exp(),
            envelope: ln_envelope.exp(),
            ratio: (ln_lhs - ln_envelope).exp(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params.get(key).copied().unwrap_or(f64::NAN)
    }
}

/// One CSV row: `name,k,y,x,lhs,envelope,ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub name: String,
    pub k: f64,
    pub y: f64,
    pub x: f64,
    pub lhs: f64,
    pub envelope: f64,
    pub ratio: f64,
}

impl ScanRow {
    pub fn from_check(c: &BoundCheck, k: f64, y: f64, x: f64) -> Self {
        Self { name: c.name.clone(), k, y, x, lhs: c.lhs, envelope: c.envelope, ratio: c.ratio }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    pub k: f64,
    pub y: f64,
    pub x: f64,
}

/// Summary of a suite or of one named bound inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub suite: String,
    pub max_ratio: f64,
    pub argmax: ArgMax,
    pub fitted_constant: f64,
    pub passed: bool,
}

/// Output record of every verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub suite: String,
    pub rows: Vec<ScanRow>,
    /// Per-name fitted constants (maximal ratios).
    pub fitted: BTreeMap<String, f64>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl ScanReport {
    pub fn new(suite: impl Into<String>, rows: Vec<ScanRow>) -> Self {
        let mut fitted = BTreeMap::new();
        for r in &rows {
            let e = fitted.entry(r.name.clone()).or_insert(f64::NEG_INFINITY);
            if r.ratio > *e || r.ratio.is_nan() {
                *e = r.ratio;
            }
        }
        let passed = rows.iter().all(|r| r.ratio.is_finite());
        Self { suite: suite.into(), rows, fitted, passed, notes: Vec::new() }
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.passed = false;
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn summarize<'a>(&self, name: String, rows: impl Iterator<Item = &'a ScanRow>) -> ScanSummary {
        let mut best: Option<&ScanRow> = None;
        for r in rows {
            if best.map_or(true, |b| r.ratio > b.ratio || (r.ratio.is_nan() && !b.ratio.is_nan())) {
                best = Some(r);
            }
        }
        match best {
            Some(b) => ScanSummary {
                suite: name,
                max_ratio: b.ratio,
                argmax: ArgMax { k: b.k, y: b.y, x: b.x },
                fitted_constant: b.ratio,
                passed: self.passed,
            },
            None => ScanSummary {
                suite: name,
                max_ratio: f64::NAN,
                argmax: ArgMax { k: f64::NAN, y: f64::NAN, x: f64::NAN },
                fitted_constant: f64::NAN,
                passed: self.passed,
            },
        }
    }

    pub fn summary(&self) -> ScanSummary {
        self.summarize(self.suite.clone(), self.rows.iter())
    }

    pub fn summary_for(&self, name: &str) -> ScanSummary {
        self.summarize(format!("{}/{}", self.suite, name), self.rows.iter().filter(|r| r.name == name))
    }

    pub fn max_ratio(&self, name: &str) -> f64 {
        self.fitted.get(name).copied().unwrap_or(f64::NAN)
    }

    /// Concatenates reports; passes only if all parts pass.
    pub fn merge(suite: impl Into<String>, parts: Vec<ScanReport>) -> Self {
        let mut rows = Vec::new();
        let mut notes = Vec::new();
        let mut passed = true;
        for p in parts {
            passed &= p.passed;
            rows.extend(p.rows);
            notes.extend(p.notes);
        }
        let mut r = Self::new(suite, rows);
        r.passed &= passed;
        r.notes = notes;
        r
    }
}
