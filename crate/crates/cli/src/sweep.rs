//! Runs the configured suites and persists records and summary as it goes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::{Report, SuiteSummary, TrialRecord, SUMMARY_HEADER};
use crate::SweepError;

fn create(path: &Path) -> Result<BufWriter<File>, SweepError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| SweepError::Io(format!("{}: {e}", parent.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| SweepError::Io(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> SweepError + '_ {
    move |e| SweepError::Io(format!("{}: {e}", path.display()))
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<Report, SweepError> {
    run_sweep_with(config, |_| {})
}

/// Like [`run_sweep`], calling `on_suite` after each suite has been written out.
///
/// Trials within a suite run on the rayon pool. Trial `t` of suite `s` uses the sub-seed
/// `seed.derive_label(s).derive(t)`, so records do not depend on the thread count.
pub fn run_sweep_with<F>(config: &ExperimentConfig, mut on_suite: F) -> Result<Report, SweepError>
where
    F: FnMut(&SuiteSummary),
{
    config.validate()?;
    let records_path = config.records_path.as_path();
    let summary_path = config.summary_path.as_path();
    let mut records_out = create(records_path)?;
    let mut summary_out = create(summary_path)?;
    summary_out.write_all(SUMMARY_HEADER.as_bytes()).map_err(io_err(summary_path))?;

    let mut records: Vec<TrialRecord> = Vec::new();
    let mut summaries = Vec::new();
    for suite_config in &config.suites {
        let suite = suite_config.name;
        let suite_seed = config.seed.derive_label(suite.name());
        let dims = config.dims_for(suite_config);
        let outcomes = config.outcomes_for(suite_config);
        let batch: Vec<TrialRecord> = (0..suite_config.trials)
            .into_par_iter()
            .map(|t| suite.run_trial(t, suite_seed.derive(t), dims, outcomes, &config.tolerances))
            .collect();
        for r in &batch {
            records_out
                .write_all(r.to_json_line().as_bytes())
                .map_err(io_err(records_path))?;
        }
        records_out.flush().map_err(io_err(records_path))?;
        let summary = SuiteSummary::from_records(suite, &batch);
        summary_out
            .write_all(summary.csv_row().as_bytes())
            .map_err(io_err(summary_path))?;
        summary_out.flush().map_err(io_err(summary_path))?;
        on_suite(&summary);
        records.extend(batch);
        summaries.push(summary);
    }
    Ok(Report { records, summaries })
}
