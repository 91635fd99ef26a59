//! Versioned experiment reports, merging, and CSV rendering.
//!
//! Everything except the `timing` block is a deterministic function of the
//! command line and seed, so two runs can be compared with [`ExperimentReport::payload`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const REPORT_SCHEMA: &str = "bitprobe-report/1";

/// CSV columns, in order.
pub const CSV_COLUMNS: [&str; 7] =
    ["suite", "criterion", "key", "passed", "tolerance", "measured", "detail"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report schema {found:?} is not {expected:?}")]
    SchemaMismatch { found: String, expected: String },
    #[error("conflicting results for suite {suite:?} key {key:?}")]
    Conflict { suite: String, key: String },
    #[error("malformed report: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u32>,
    /// Identifies the parameters the outcome belongs to, e.g. `m=3,n=1`.
    pub key: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub measured: BTreeMap<String, Value>,
    #[serde(default)]
    pub detail: String,
}

impl Outcome {
    pub fn new(suite: &str, key: impl Into<String>, passed: bool) -> Self {
        Self {
            suite: suite.into(),
            criterion: None,
            key: key.into(),
            passed,
            tolerance: None,
            measured: BTreeMap::new(),
            detail: String::new(),
        }
    }

    pub fn criterion(mut self, c: u32) -> Self {
        self.criterion = Some(c);
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn measure(mut self, name: &str, value: impl Serialize) -> Self {
        self.measured
            .insert(name.into(), serde_json::to_value(value).expect("measurement serializes"));
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = text.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_seconds: f64,
    /// Per-outcome wall clock, keyed by `suite/key`.
    #[serde(default)]
    pub sections: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub artifact_version: String,
    pub command: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outcomes: Vec<Outcome>,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn new(command: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            command,
            parameters: BTreeMap::new(),
            seed,
            outcomes: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn parameter(&mut self, name: &str, value: impl Serialize) {
        self.parameters
            .insert(name.into(), serde_json::to_value(value).expect("parameter serializes"));
    }

    pub fn push(&mut self, outcome: Outcome, seconds: f64) {
        self.timing.sections.insert(format!("{}/{}", outcome.suite, outcome.key), seconds);
        self.outcomes.push(outcome);
    }

    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let report: Self =
            serde_json::from_str(text).map_err(|e| ReportError::Format(e.to_string()))?;
        if report.schema != REPORT_SCHEMA {
            return Err(ReportError::SchemaMismatch {
                found: report.schema,
                expected: REPORT_SCHEMA.into(),
            });
        }
        Ok(report)
    }

    /// The report without its timing block, as JSON.
    pub fn payload(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&value).expect("payload serializes")
    }
}

/// Union of the outcomes of several reports, keyed by `(suite, key)`. Identical
/// duplicates collapse; differing duplicates are a conflict.
pub fn merge(reports: &[ExperimentReport]) -> Result<ExperimentReport, ReportError> {
    let mut merged = ExperimentReport::new(vec!["report".into(), "merge".into()], None);
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (index, report) in reports.iter().enumerate() {
        if report.schema != REPORT_SCHEMA {
            return Err(ReportError::SchemaMismatch {
                found: report.schema.clone(),
                expected: REPORT_SCHEMA.into(),
            });
        }
        merged.parameter(&format!("source_{index}"), &report.command);
        merged.timing.wall_clock_seconds += report.timing.wall_clock_seconds;
        for outcome in &report.outcomes {
            let key = (outcome.suite.clone(), outcome.key.clone());
            match seen.get(&key) {
                Some(&i) if merged.outcomes[i] == *outcome => {}
                Some(_) => return Err(ReportError::Conflict { suite: key.0, key: key.1 }),
                None => {
                    let section = format!("{}/{}", outcome.suite, outcome.key);
                    if let Some(&t) = report.timing.sections.get(&section) {
                        merged.timing.sections.insert(section, t);
                    }
                    seen.insert(key, merged.outcomes.len());
                    merged.outcomes.push(outcome.clone());
                }
            }
        }
    }
    Ok(merged)
}

/// One row per outcome, columns as in [`CSV_COLUMNS`]; `measured` is compact JSON.
pub fn render_csv(report: &ExperimentReport) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_COLUMNS).expect("in-memory write");
    for o in &report.outcomes {
        writer
            .write_record([
                o.suite.clone(),
                o.criterion.map(|c| c.to_string()).unwrap_or_default(),
                o.key.clone(),
                o.passed.to_string(),
                o.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                serde_json::to_string(&o.measured).expect("measurements serialize"),
                o.detail.clone(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(suite: &str, value: f64) -> ExperimentReport {
        let mut r = ExperimentReport::new(vec!["verify".into(), suite.into()], Some(7));
        r.push(Outcome::new(suite, "m=3", true).measure("value", value).tolerance(1e-9), 0.5);
        r.timing.wall_clock_seconds = 0.5;
        r
    }

    #[test]
    fn merge_unions_disjoint_suites() {
        let m = merge(&[report("a", 1.0), report("b", 2.0)]).unwrap();
        assert_eq!(m.outcomes.len(), 2);
        assert_eq!(m.timing.sections.len(), 2);
        let again = merge(&[report("a", 1.0), report("a", 1.0)]).unwrap();
        assert_eq!(again.outcomes.len(), 1);
    }

    #[test]
    fn merge_detects_conflicts_and_schema_mismatch() {
        assert!(matches!(merge(&[report("a", 1.0), report("a", 1.5)]), Err(ReportError::Conflict { .. })));
        let mut old = report("a", 1.0);
        old.schema = "bitprobe-report/0".into();
        assert!(matches!(merge(&[old.clone()]), Err(ReportError::SchemaMismatch { .. })));
        assert!(ExperimentReport::from_json(&old.to_json()).is_err());
    }

    #[test]
    fn payload_ignores_timing_and_floats_round_trip() {
        let mut a = report("a", 0.1 + 0.2);
        let b = ExperimentReport::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        a.timing.wall_clock_seconds = 99.0;
        assert_eq!(a.payload(), b.payload());
        assert!(!a.payload().contains("wall_clock"));
    }

    #[test]
    fn csv_layout() {
        let mut r = report("a", 1.0);
        r.push(Outcome::new("b", "x,y", false).criterion(4).detail("needs \"quotes\""), 0.0);
        let text = render_csv(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "suite,criterion,key,passed,tolerance,measured,detail");
        assert_eq!(lines[1], "a,,m=3,true,1e-9,\"{\"\"value\"\":1.0}\",");
        assert!(lines[2].starts_with("b,4,\"x,y\",false,,{},"));
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(reader.records().count(), 2);
    }
}
