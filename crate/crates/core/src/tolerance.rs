//! Numerical tolerances shared by every module.
//!
//! A single [`Tolerances`] value is threaded through all checks so that the
//! command line, the sweep configuration and the environment can tune them in one place.

use serde::{Deserialize, Serialize};

/// Environment variable prefix for tolerance overrides, e.g. `POVMRT_EPS_FEAS=1e-6`.
pub const ENV_PREFIX: &str = "POVMRT_";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute Hermiticity tolerance on `|A_ij - conj(A_ji)|`.
    pub herm: f64,
    /// PSD tolerance, relative to the operator norm.
    pub psd: f64,
    /// Max-entry tolerance for proportionality, zero tests and canonical comparison.
    pub prop: f64,
    /// Max-entry tolerance on `sum_i E_i - 1`.
    pub comp: f64,
    /// Column-sum tolerance for stochastic matrices and probability vectors.
    pub stoch: f64,
    /// L1 residual below which a post-processing LP counts as feasible.
    pub feas: f64,
    /// Rank threshold, relative to the operator norm.
    pub rank: f64,
    /// Outcome probabilities at or below this are treated as zero.
    pub prob: f64,
    /// Slack on majorization partial sums.
    pub maj: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-9,
            prop: 1e-8,
            comp: 1e-8,
            stoch: 1e-9,
            feas: 1e-7,
            rank: 1e-8,
            prob: 1e-12,
            maj: 1e-8,
        }
    }
}

impl Tolerances {
    /// Applies `POVMRT_EPS_<NAME>` overrides from the process environment.
    pub fn from_env(self) -> Result<Self, String> {
        self.with_overrides(|key| std::env::var(key).ok())
    }

    /// Applies overrides from an arbitrary key lookup (used by tests and `from_env`).
    pub fn with_overrides<F>(mut self, lookup: F) -> Result<Self, String>
    where
        F: Fn(&str) -> Option<String>,
    {
        let fields: [(&str, &mut f64); 9] = [
            ("HERM", &mut self.herm),
            ("PSD", &mut self.psd),
            ("PROP", &mut self.prop),
            ("COMP", &mut self.comp),
            ("STOCH", &mut self.stoch),
            ("FEAS", &mut self.feas),
            ("RANK", &mut self.rank),
            ("PROB", &mut self.prob),
            ("MAJ", &mut self.maj),
        ];
        for (name, slot) in fields {
            let key = format!("{ENV_PREFIX}EPS_{name}");
            if let Some(raw) = lookup(&key) {
                let value: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{key}: cannot parse {raw:?} as a number"))?;
                if !(value.is_finite() && value >= 0.0) {
                    return Err(format!("{key}: tolerance must be finite and non-negative"));
                }
                *slot = value;
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_replace_only_named_fields() {
        let tol = Tolerances::default()
            .with_overrides(|k| (k == "POVMRT_EPS_FEAS").then(|| "1e-5".to_string()))
            .unwrap();
        assert_eq!(tol.feas, 1e-5);
        assert_eq!(tol.herm, Tolerances::default().herm);
    }

    #[test]
    fn rejects_garbage_override() {
        let err = Tolerances::default()
            .with_overrides(|k| (k == "POVMRT_EPS_PSD").then(|| "lots".to_string()))
            .unwrap_err();
        assert!(err.contains("POVMRT_EPS_PSD"));
        assert!(Tolerances::default()
            .with_overrides(|k| (k == "POVMRT_EPS_PSD").then(|| "-1".to_string()))
            .is_err());
    }
}
