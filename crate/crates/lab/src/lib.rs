//! Batch verification and command-line front end for `normderiv-core`:
//! seeded property suites, JSON reports, failure replay and input parsing.

pub mod error;
pub mod gen;
pub mod parse;
pub mod replay;
pub mod report;
pub mod suites;

pub use error::LabError;
pub use replay::{replay_failure, ReplayTrace};
pub use report::{Failure, SuiteReport, Tolerances};
pub use suites::{run_suite, Suite};
