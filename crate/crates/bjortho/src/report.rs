use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::instance::Instance;
use crate::suites::{check_instance, run_trial, suite_instance, Status, TrialOutcome};
use crate::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

/// Everything needed to re-run one failed trial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailureRecord {
    pub schema_version: u32,
    pub config: SuiteConfig,
    pub trial: usize,
    pub seed: u64,
    pub instance: Instance,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub config: SuiteConfig,
    pub summary: Summary,
    pub trials: Vec<TrialOutcome>,
    pub failures: Vec<FailureRecord>,
    /// The only field that varies between identical runs.
    pub wall_clock_seconds: f64,
}

impl SuiteReport {
    /// Process exit code: 0 all pass, 1 any failure, 2 inconclusive only.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            1
        } else if self.summary.inconclusive > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per report for terminals.
    pub fn headline(&self) -> String {
        let s = &self.summary;
        format!(
            "{}: {} trials, {} passed, {} failed, {} inconclusive ({:.2}s)",
            self.config.suite, s.trials, s.passed, s.failed, s.inconclusive, self.wall_clock_seconds
        )
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let mut trials: Vec<TrialOutcome> = (0..config.trials).map(|i| run_trial(config, i)).collect();
    trials.sort_by_key(|t| t.trial);
    let mut summary = Summary { trials: trials.len(), ..Summary::default() };
    let mut failures = Vec::new();
    for t in &trials {
        match t.status {
            Status::Pass => summary.passed += 1,
            Status::Inconclusive => summary.inconclusive += 1,
            Status::Fail => {
                summary.failed += 1;
                failures.push(FailureRecord {
                    schema_version: SCHEMA_VERSION,
                    config: SuiteConfig { out: None, ..config.clone() },
                    trial: t.trial,
                    seed: t.seed,
                    instance: suite_instance(config, t.trial)?,
                    reason: t.note.clone().unwrap_or_default(),
                });
            }
        }
    }
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        summary,
        trials,
        failures,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn emit_report(report: &SuiteReport, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, report.to_json()).map_err(|e| HarnessError::Io(path.display().to_string(), e.to_string()))
}

pub fn load_report(path: &Path) -> Result<SuiteReport, HarnessError> {
    parse_file(path)
}

pub(crate) fn parse_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json(path.display().to_string(), e.to_string()))
}

/// Re-runs the check of a recorded failure on its stored instance.
pub fn replay(record: &FailureRecord) -> Result<TrialOutcome, HarnessError> {
    if record.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::Config(format!("unsupported schema version {}", record.schema_version)));
    }
    Ok(check_instance(&record.config, record.trial, record.seed, &record.instance))
}

/// Failure records from a file holding either one record or a whole report.
pub fn load_failures(path: &Path) -> Result<Vec<FailureRecord>, HarnessError> {
    let value: serde_json::Value = parse_file(path)?;
    let malformed = |e: serde_json::Error| HarnessError::Json(path.display().to_string(), e.to_string());
    if value.get("failures").is_some() {
        let report: SuiteReport = serde_json::from_value(value).map_err(malformed)?;
        Ok(report.failures)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(malformed)?])
    }
}
