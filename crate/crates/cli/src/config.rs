//! Sweep configuration, read from a JSON file.

use std::path::{Path, PathBuf};

use povmrt_core::{RngSeed, Tolerances};
use serde::{Deserialize, Serialize};

use crate::suites::Suite;
use crate::SweepError;

/// Inclusive integer range written as `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange(pub usize, pub usize);

impl IntRange {
    pub fn min(self) -> usize {
        self.0
    }

    pub fn max(self) -> usize {
        self.1
    }

    fn check(self, field: &str) -> Result<(), SweepError> {
        if self.0 == 0 || self.0 > self.1 {
            return Err(SweepError::Config(format!(
                "{field}: range [{}, {}] must satisfy 1 <= min <= max",
                self.0, self.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: Suite,
    pub trials: u64,
    /// Overrides the sweep-wide dimension range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<IntRange>,
    /// Overrides the sweep-wide outcome-count range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<IntRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: RngSeed,
    pub dims: IntRange,
    pub outcomes: IntRange,
    pub suites: Vec<SuiteConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// One JSON record per line.
    pub records_path: PathBuf,
    /// Comma-separated summary table.
    pub summary_path: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &[u8]) -> Result<Self, SweepError> {
        let config: ExperimentConfig =
            serde_json::from_slice(text).map_err(|e| SweepError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, SweepError> {
        let text = std::fs::read(path).map_err(|e| SweepError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.dims.check("dims")?;
        self.outcomes.check("outcomes")?;
        if self.suites.is_empty() {
            return Err(SweepError::Config("suites: at least one suite is required".into()));
        }
        for (k, s) in self.suites.iter().enumerate() {
            if s.trials == 0 {
                return Err(SweepError::Config(format!("suites[{k}].trials: must be at least 1")));
            }
            if let Some(r) = s.dims {
                r.check(&format!("suites[{k}].dims"))?;
            }
            if let Some(r) = s.outcomes {
                r.check(&format!("suites[{k}].outcomes"))?;
            }
            if self.suites[..k].iter().any(|o| o.name == s.name) {
                return Err(SweepError::Config(format!("suites[{k}]: {} listed twice", s.name)));
            }
        }
        Ok(())
    }

    pub fn dims_for(&self, suite: &SuiteConfig) -> IntRange {
        suite.dims.unwrap_or(self.dims)
    }

    pub fn outcomes_for(&self, suite: &SuiteConfig) -> IntRange {
        suite.outcomes.unwrap_or(self.outcomes)
    }
}
