use std::collections::BTreeMap;

use normderiv_core::sampling::{trial_rng, TrialRng};
use normderiv_core::tolerance;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::LabError;

/// Tolerances a suite compares against. All are relative to the natural
/// scale of the quantity being checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub exact: f64,
    pub oracle: f64,
    pub additivity: f64,
    pub orthogonality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: tolerance::EXACT,
            oracle: tolerance::ORACLE,
            additivity: tolerance::ADDITIVITY,
            orthogonality: tolerance::ORTHOGONALITY,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 4] = ["exact", "oracle", "additivity", "orthogonality"];

    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> Result<Self, LabError> {
        let mut t = Tolerances::default();
        for (key, &value) in overrides {
            if !value.is_finite() {
                return Err(LabError::Input(format!("tolerance {key} must be finite")));
            }
            match key.as_str() {
                "exact" => t.exact = value,
                "oracle" => t.oracle = value,
                "additivity" => t.additivity = value,
                "orthogonality" => t.orthogonality = value,
                other => {
                    return Err(LabError::Input(format!(
                        "unknown tolerance {other:?}; expected one of {:?}",
                        Tolerances::KEYS
                    )))
                }
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub suite: String,
    pub trial: usize,
    pub check: String,
    pub inputs: Value,
    pub expected: Value,
    pub observed: Value,
    /// `None` when the check is a verdict rather than a measurement.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
    pub cases_run: usize,
    pub failure_count: usize,
    /// The first failures in trial order; at most `MAX_RECORDED_FAILURES`
    /// per suite.
    pub failures: Vec<Failure>,
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsuites: Vec<SuiteReport>,
}

pub const MAX_RECORDED_FAILURES: usize = 100;

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// JSON with every elapsed time zeroed, for comparing runs.
    pub fn timeless_json(&self) -> String {
        let mut r = self.clone();
        r.zero_elapsed();
        serde_json::to_string_pretty(&r).expect("reports serialize")
    }

    fn zero_elapsed(&mut self) {
        self.elapsed_seconds = 0.0;
        for s in &mut self.subsuites {
            s.zero_elapsed();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub label: String,
    pub value: Value,
}

/// One trial of one suite: hands out its random streams and collects
/// check outcomes, and optionally a trace of intermediate values.
pub struct Case<'a> {
    pub suite: &'static str,
    pub seed: u64,
    pub trial: usize,
    pub tol: &'a Tolerances,
    stream_base: u64,
    checks: usize,
    failures: Vec<Failure>,
    trace: Option<Vec<TraceEntry>>,
}

pub struct CaseOutcome {
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub trace: Vec<TraceEntry>,
}

impl<'a> Case<'a> {
    pub(crate) fn new(
        suite: &'static str,
        stream_base: u64,
        seed: u64,
        trial: usize,
        tol: &'a Tolerances,
        tracing: bool,
    ) -> Self {
        Case {
            suite,
            seed,
            trial,
            tol,
            stream_base,
            checks: 0,
            failures: Vec::new(),
            trace: tracing.then(Vec::new),
        }
    }

    pub(crate) fn finish(self) -> CaseOutcome {
        CaseOutcome {
            checks: self.checks,
            failures: self.failures,
            trace: self.trace.unwrap_or_default(),
        }
    }

    /// Independent generator number `k` of this trial.
    pub fn rng(&self, k: u64) -> TrialRng {
        trial_rng(self.seed, self.stream_base * 64 + k, self.trial as u64)
    }

    /// A seed for library routines that sample on their own.
    pub fn derived_seed(&self, k: u64) -> u64 {
        use rand::RngCore;
        self.rng(32 + k).next_u64()
    }

    pub fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    pub fn note<T: Serialize + ?Sized>(&mut self, label: &str, value: &T) {
        if let Some(t) = &mut self.trace {
            t.push(TraceEntry {
                label: label.to_string(),
                value: serde_json::to_value(value).unwrap_or(Value::Null),
            });
        }
    }

    fn record(
        &mut self,
        check: &str,
        inputs: impl FnOnce() -> Value,
        expected: Value,
        observed: Value,
        residual: Option<f64>,
        ok: bool,
    ) -> bool {
        self.checks += 1;
        if let Some(t) = &mut self.trace {
            t.push(TraceEntry {
                label: format!("check {check}"),
                value: json!({"expected": expected, "observed": observed, "residual": residual, "ok": ok}),
            });
        }
        if !ok {
            self.failures.push(Failure {
                suite: self.suite.to_string(),
                trial: self.trial,
                check: check.to_string(),
                inputs: inputs(),
                expected,
                observed,
                residual,
            });
        }
        ok
    }

    /// Passes when `|expected - observed| <= tol`.
    pub fn close(
        &mut self,
        check: &str,
        inputs: impl FnOnce() -> Value,
        expected: f64,
        observed: f64,
        tol: f64,
    ) -> bool {
        let r = (expected - observed).abs();
        self.record(
            check,
            inputs,
            json!(expected),
            json!(observed),
            Some(r),
            r <= tol,
        )
    }

    /// Passes when a nonnegative violation measure stays within `tol`.
    pub fn within(
        &mut self,
        check: &str,
        inputs: impl FnOnce() -> Value,
        residual: f64,
        tol: f64,
    ) -> bool {
        self.record(
            check,
            inputs,
            json!(format!("<= {tol:e}")),
            json!(residual),
            Some(residual),
            residual <= tol,
        )
    }

    pub fn equal<T: Serialize + PartialEq>(
        &mut self,
        check: &str,
        inputs: impl FnOnce() -> Value,
        expected: T,
        observed: T,
    ) -> bool {
        let ok = expected == observed;
        self.record(check, inputs, json!(expected), json!(observed), None, ok)
    }

    pub fn holds(&mut self, check: &str, inputs: impl FnOnce() -> Value, ok: bool) -> bool {
        self.record(check, inputs, json!(true), json!(ok), None, ok)
    }

    /// Unwraps a library result, recording an error as a failed check.
    pub fn ok<T>(
        &mut self,
        check: &str,
        inputs: impl FnOnce() -> Value,
        result: Result<T, normderiv_core::Error>,
    ) -> Option<T> {
        match result {
            Ok(v) => {
                self.checks += 1;
                Some(v)
            }
            Err(e) => {
                self.record(
                    check,
                    inputs,
                    json!("no error"),
                    json!(e.to_string()),
                    None,
                    false,
                );
                None
            }
        }
    }
}
