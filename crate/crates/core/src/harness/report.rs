//! JSON report envelope and per-trial CSV rows.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Schema version of [`Report`]; bumped on incompatible field changes.
pub const REPORT_VERSION: &str = "1";

/// Top-level JSON object written by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub bounds: Value,
    /// `null` when the command has no sample-size thresholds.
    pub threshold_vacuous: Option<bool>,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize, results: impl Serialize) -> Result<Self> {
        Ok(Report {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            results: serde_json::to_value(results)?,
            bounds: Value::Null,
            threshold_vacuous: None,
            version: REPORT_VERSION,
        })
    }

    pub fn with_bounds(mut self, bounds: impl Serialize) -> Result<Self> {
        self.bounds = serde_json::to_value(bounds)?;
        Ok(self)
    }

    pub fn with_vacuity(mut self, vacuous: bool) -> Self {
        self.threshold_vacuous = Some(vacuous);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One CSV row. Missing numbers are written as empty fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    pub omega_size: usize,
    #[serde(serialize_with = "as_digit")]
    pub success: bool,
    pub objective: Option<f64>,
    pub residual: Option<f64>,
}

fn as_digit<S: serde::Serializer>(v: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*v))
}

pub fn write_csv(path: &Path, rows: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["trial_index", "seed", "omega_size", "success", "objective", "residual"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
