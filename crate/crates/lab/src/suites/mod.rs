//! Seeded verification suites. Every trial draws from its own addressable
//! random streams, so a run is reproducible trial by trial and a recorded
//! failure can be replayed in isolation.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::report::{Case, CaseOutcome, SuiteReport, Tolerances, MAX_RECORDED_FAILURES};

mod operators;
mod rays;
mod smoothness;
mod vectors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    NormAxioms,
    DerivativeProperties,
    OracleAgreement,
    OrthogonalityCharacterizations,
    RayExampleLinf,
    SmoothnessCodimension,
    Kh,
    RhoRemark,
    L1Domain,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::NormAxioms,
        Suite::DerivativeProperties,
        Suite::OracleAgreement,
        Suite::OrthogonalityCharacterizations,
        Suite::RayExampleLinf,
        Suite::SmoothnessCodimension,
        Suite::Kh,
        Suite::RhoRemark,
        Suite::L1Domain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::NormAxioms => "norm-axioms",
            Suite::DerivativeProperties => "derivative-properties",
            Suite::OracleAgreement => "oracle-agreement",
            Suite::OrthogonalityCharacterizations => "orthogonality-characterizations",
            Suite::RayExampleLinf => "ray-example-linf",
            Suite::SmoothnessCodimension => "smoothness-codimension",
            Suite::Kh => "kh",
            Suite::RhoRemark => "rho-remark",
            Suite::L1Domain => "l1-domain",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::NormAxioms
            | Suite::DerivativeProperties
            | Suite::OracleAgreement
            | Suite::OrthogonalityCharacterizations => 1000,
            Suite::RayExampleLinf => 50,
            Suite::SmoothnessCodimension | Suite::Kh | Suite::RhoRemark | Suite::L1Domain => 200,
        }
    }

    fn stream(self) -> u64 {
        100 + Suite::ALL.iter().position(|s| *s == self).expect("listed") as u64
    }

    fn run_trial(self, case: &mut Case) {
        match self {
            Suite::NormAxioms => vectors::norm_axioms(case),
            Suite::DerivativeProperties => vectors::derivative_properties(case),
            Suite::OracleAgreement => vectors::oracle_agreement(case),
            Suite::OrthogonalityCharacterizations => vectors::characterizations(case),
            Suite::RayExampleLinf => rays::ray_example(case),
            Suite::SmoothnessCodimension => smoothness::codimension(case),
            Suite::Kh => operators::kh(case),
            Suite::RhoRemark => operators::rho_remark(case),
            Suite::L1Domain => operators::l1_domain(case),
        }
    }
}

/// Accepted by `run_suite`: every suite name plus `all`.
pub fn suite_names() -> Vec<&'static str> {
    let mut v: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
    v.push("all");
    v
}

/// Runs one trial, optionally tracing intermediate values.
pub fn run_case(
    suite: Suite,
    seed: u64,
    trial: usize,
    tol: &Tolerances,
    tracing: bool,
) -> CaseOutcome {
    let mut case = Case::new(suite.name(), suite.stream(), seed, trial, tol, tracing);
    suite.run_trial(&mut case);
    case.finish()
}

pub fn run(suite: Suite, seed: u64, trials: usize, tol: &Tolerances) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<CaseOutcome> = (0..trials)
        .into_par_iter()
        .map(|trial| run_case(suite, seed, trial, tol, false))
        .collect();
    let mut report = SuiteReport {
        suite_name: suite.name().to_string(),
        seed,
        trials,
        tolerances: *tol,
        cases_run: 0,
        failure_count: 0,
        failures: Vec::new(),
        elapsed_seconds: 0.0,
        subsuites: Vec::new(),
    };
    for o in outcomes {
        report.cases_run += o.checks;
        report.failure_count += o.failures.len();
        let room = MAX_RECORDED_FAILURES - report.failures.len().min(MAX_RECORDED_FAILURES);
        report.failures.extend(o.failures.into_iter().take(room));
    }
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    report
}

/// Runs a suite by name. `trials` overrides the default count; for `all` it
/// applies to every subsuite.
pub fn run_suite(
    name: &str,
    seed: u64,
    trials: Option<usize>,
    tolerance_overrides: &BTreeMap<String, f64>,
) -> Result<SuiteReport, LabError> {
    let tol = Tolerances::with_overrides(tolerance_overrides)?;
    if trials == Some(0) {
        return Err(LabError::Input("trial count must be positive".into()));
    }
    if name == "all" {
        let start = Instant::now();
        let subsuites: Vec<SuiteReport> = Suite::ALL
            .iter()
            .map(|s| run(*s, seed, trials.unwrap_or(s.default_trials()), &tol))
            .collect();
        return Ok(SuiteReport {
            suite_name: "all".into(),
            seed,
            trials: subsuites.iter().map(|s| s.trials).sum(),
            tolerances: tol,
            cases_run: subsuites.iter().map(|s| s.cases_run).sum(),
            failure_count: subsuites.iter().map(|s| s.failure_count).sum(),
            failures: subsuites
                .iter()
                .flat_map(|s| s.failures.iter().cloned())
                .collect(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
            subsuites,
        });
    }
    let suite = Suite::from_name(name).ok_or_else(|| {
        LabError::Input(format!(
            "unknown suite {name:?}; expected one of {:?}",
            suite_names()
        ))
    })?;
    Ok(run(
        suite,
        seed,
        trials.unwrap_or(suite.default_trials()),
        &tol,
    ))
}
