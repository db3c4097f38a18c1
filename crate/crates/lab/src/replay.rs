use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::report::{Failure, SuiteReport, TraceEntry};
use crate::suites::{run_case, Suite};

/// A recorded failure rerun in isolation with every intermediate value kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayTrace {
    pub suite: String,
    pub seed: u64,
    pub trial: usize,
    pub check: String,
    pub recorded_residual: Option<f64>,
    pub reproduced_residual: Option<f64>,
    /// The rerun failed the same check on the same inputs with the same residual.
    pub reproduced: bool,
    /// Every failure of the rerun trial, not only the replayed one.
    pub trial_failures: Vec<Failure>,
    pub trace: Vec<TraceEntry>,
}

pub fn replay_failure(report_path: &Path, index: usize) -> Result<ReplayTrace, LabError> {
    let text = std::fs::read_to_string(report_path)?;
    let report: SuiteReport = serde_json::from_str(&text)?;
    replay_from_report(&report, index)
}

pub fn replay_from_report(report: &SuiteReport, index: usize) -> Result<ReplayTrace, LabError> {
    if report.failures.is_empty() {
        return Err(LabError::Input(format!(
            "report for {} has no recorded failures",
            report.suite_name
        )));
    }
    let recorded = report.failures.get(index).ok_or_else(|| {
        LabError::Input(format!(
            "failure index {index} out of range; the report records {}",
            report.failures.len()
        ))
    })?;
    let suite = Suite::from_name(&recorded.suite)
        .ok_or_else(|| LabError::Input(format!("unknown suite {:?} in report", recorded.suite)))?;
    let outcome = run_case(suite, report.seed, recorded.trial, &report.tolerances, true);
    let rerun = outcome
        .failures
        .iter()
        .find(|f| f.check == recorded.check && f.inputs == recorded.inputs)
        .or_else(|| outcome.failures.iter().find(|f| f.check == recorded.check));
    Ok(ReplayTrace {
        suite: recorded.suite.clone(),
        seed: report.seed,
        trial: recorded.trial,
        check: recorded.check.clone(),
        recorded_residual: recorded.residual,
        reproduced_residual: rerun.and_then(|f| f.residual),
        reproduced: rerun.is_some_and(|f| f == recorded),
        trial_failures: outcome.failures.clone(),
        trace: outcome.trace,
    })
}
