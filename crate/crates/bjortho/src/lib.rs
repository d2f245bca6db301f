//! Seeded property suites over the `bjortho-core` library, their JSON
//! reports, and the pieces of the `bjortho` command line tool.
//!
//! Every trial draws its instance from a seed split off the suite seed, so a
//! single trial can be regenerated or replayed from its failure record.

pub mod config;
pub mod instance;
pub mod oracles;
pub mod report;
pub mod suites;

use std::path::Path;

pub use config::{Suite, SuiteConfig};
pub use instance::{gen_instance, Instance, InstanceKind};
pub use report::{emit_report, load_failures, load_report, replay, run_suite, FailureRecord, SuiteReport, Summary, SCHEMA_VERSION};
pub use suites::{Status, TrialOutcome};

use bjortho_core::Operator64;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bjortho_core::Error),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("{0}: malformed JSON: {1}")]
    Json(String, String),
}

/// Reads an operator in the `{"matrix": .., "domain": .., "codomain": ..}` format.
pub fn load_operator(path: &Path) -> Result<Operator64, HarnessError> {
    report::parse_file(path)
}
