//! Per-trial records and the per-suite summary derived from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use povmrt_core::RngSeed;
use serde::{Deserialize, Serialize};

use crate::suites::Suite;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub suite: Suite,
    pub trial: u64,
    pub seed: RngSeed,
    pub dim: usize,
    pub outcomes: usize,
    pub passed: bool,
    /// How far the checked property was from holding; binary checks use 0 or 1.
    pub violation: f64,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TrialRecord {
    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records always serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub max_violation: f64,
    pub required_pass_rate: f64,
    pub ok: bool,
}

pub const SUMMARY_HEADER: &str = "suite,trials,passed,failed,max_violation,required_pass_rate,status\n";

impl SuiteSummary {
    /// Recomputes the summary of one suite from its records.
    pub fn from_records(suite: Suite, records: &[TrialRecord]) -> Self {
        let mine = records.iter().filter(|r| r.suite == suite);
        let (mut trials, mut passed, mut max_violation) = (0u64, 0u64, 0.0f64);
        for r in mine {
            trials += 1;
            passed += r.passed as u64;
            if r.violation > max_violation || r.violation.is_nan() {
                max_violation = r.violation;
            }
        }
        let required_pass_rate = suite.required_pass_rate();
        let ok = trials > 0 && passed as f64 >= required_pass_rate * trials as f64;
        SuiteSummary {
            suite,
            trials,
            passed,
            failed: trials - passed,
            max_violation,
            required_pass_rate,
            ok,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{},{}\n",
            self.suite,
            self.trials,
            self.passed,
            self.failed,
            self.max_violation,
            self.required_pass_rate,
            if self.ok { "pass" } else { "fail" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SuiteSummary>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summaries.iter().all(|s| s.ok)
    }

    pub fn summary(&self, suite: Suite) -> Option<&SuiteSummary> {
        self.summaries.iter().find(|s| s.suite == suite)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        for s in &self.summaries {
            out.push_str(&s.csv_row());
        }
        out
    }

    pub fn records_jsonl(&self) -> String {
        self.records.iter().map(TrialRecord::to_json_line).collect()
    }

    /// Fixed-width table for terminals.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<20} {:>7} {:>7} {:>7} {:>14}  status\n",
            "suite", "trials", "passed", "failed", "max_violation"
        );
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{:<20} {:>7} {:>7} {:>7} {:>14.3e}  {}",
                s.suite.to_string(),
                s.trials,
                s.passed,
                s.failed,
                s.max_violation,
                if s.ok { "pass" } else { "FAIL" }
            );
        }
        out
    }
}

/// Sorts records by suite (declaration order of [`Suite`]) then trial index.
pub fn canonical_sort(records: &mut [TrialRecord]) {
    records.sort_by_key(|r| (r.suite, r.trial));
}

/// Parses a records file back into records.
pub fn parse_records(text: &str) -> Result<Vec<TrialRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
