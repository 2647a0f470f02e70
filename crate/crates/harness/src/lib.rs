//! Experiment harness for the subdiffusion L1 solver: convergence studies
//! (CSV) and verification suites (JSON), exposed both as a library and
//! through the `subdiff` CLI.
//!
//! Sweep cells are independent work items executed through an
//! order-preserving parallel map (`parallel` feature, on by default); output
//! bytes are identical regardless of thread count, and `--threads 1` pins
//! the whole run to one worker.

pub mod config;
pub mod error;
pub mod par;
pub mod problems;
pub mod report;
pub mod studies;
pub mod verify;

use config::{StudyConfig, StudyKind};
use error::{HarnessError, Result};

/// What a run produces: the primary artifact plus an optional CSV
/// side-product (suites with exportable per-cell data).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Artifact {
    Csv(String),
    Json(String),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub primary: Artifact,
    pub side_csv: Option<String>,
}

/// Executes the configured study or suite and renders its artifacts.
pub fn run(config: &StudyConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.study {
        StudyKind::Example1
        | StudyKind::Example2a
        | StudyKind::Example2b
        | StudyKind::Example2c
        | StudyKind::Example2d => {
            let report = studies::run_convergence_study(config)?;
            Ok(RunOutput {
                primary: Artifact::Csv(report.to_csv()),
                side_csv: None,
            })
        }
        StudyKind::Spatial => {
            // the operator invariants guard the refinement study
            let suite = verify::run_verification_suites(config)?;
            if !suite.pass {
                return Err(HarnessError::Verification(suite.violations.join("; ")));
            }
            let report = studies::run_spatial(config)?;
            Ok(RunOutput {
                primary: Artifact::Csv(report.to_csv()),
                side_csv: None,
            })
        }
        StudyKind::Truncation | StudyKind::Gronwall | StudyKind::Kernel => {
            let suite = verify::run_verification_suites(config)?;
            if !suite.pass {
                return Err(HarnessError::Verification(suite.violations.join("; ")));
            }
            Ok(RunOutput {
                primary: Artifact::Json(suite.json),
                side_csv: suite.side_csv,
            })
        }
    }
}
