//! Check outcomes shared by every verification suite.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotFalsified,
    Skipped,
}

/// Serializes non-finite reals as the strings `inf`, `-inf`, `nan`.
pub fn ext_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ext_real_map<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &ExtReal(*v))?;
    }
    map.end()
}

struct ExtReal(f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ext_real(&self.0, s)
    }
}

/// One line item of a verification suite.
///
/// `status` is `Fail` exactly when `max_violation > tolerance + allowance`
/// for rows built through [`CheckRow::measured`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    /// The identity or inequality being checked, written out.
    pub reference: String,
    pub status: Status,
    #[serde(serialize_with = "ext_real")]
    pub max_violation: f64,
    #[serde(serialize_with = "ext_real")]
    pub tolerance: f64,
    #[serde(serialize_with = "ext_real")]
    pub allowance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", serialize_with = "ext_real_map")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckRow {
    pub fn measured(
        name: impl Into<String>,
        reference: impl Into<String>,
        max_violation: f64,
        tolerance: f64,
        allowance: f64,
    ) -> Self {
        let status = if max_violation > tolerance + allowance || max_violation.is_nan() {
            Status::Fail
        } else {
            Status::Pass
        };
        Self {
            name: name.into(),
            reference: reference.into(),
            status,
            max_violation,
            tolerance,
            allowance,
            witness: None,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// A falsification search: `found` counterexamples turn the row into a
    /// failure, otherwise the claim is reported as not falsified.
    pub fn falsifier(name: impl Into<String>, reference: impl Into<String>, found: usize) -> Self {
        let mut row = Self::measured(name, reference, found as f64, 0.0, 0.0);
        if found == 0 {
            row.status = Status::NotFalsified;
        }
        row
    }

    pub fn skipped(name: impl Into<String>, reference: impl Into<String>, why: impl Into<String>) -> Self {
        let mut row = Self::measured(name, reference, 0.0, 0.0, 0.0);
        row.status = Status::Skipped;
        row.notes.push(why.into());
        row
    }

    /// A failed row carrying an error message instead of a measurement.
    pub fn errored(name: impl Into<String>, reference: impl Into<String>, err: impl std::fmt::Display) -> Self {
        let mut row = Self::measured(name, reference, f64::INFINITY, 0.0, 0.0);
        row.notes.push(format!("error: {err}"));
        row
    }

    pub fn with_witness(mut self, w: Vec<Vec<f64>>) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_metric(mut self, key: &str, v: f64) -> Self {
        self.metrics.insert(key.to_string(), v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub not_falsified: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<CheckRow>,
    pub summary: Summary,
    pub wall_time: f64,
}

impl CheckReport {
    pub fn new(scenario: impl Into<String>, seed: u64, checks: Vec<CheckRow>, wall_time: f64) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::NotFalsified => summary.not_falsified += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self {
            scenario: scenario.into(),
            seed,
            checks,
            summary,
            wall_time,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }
}
