//! Pipeline behind the `splitgain` binary.
//!
//! [`analyze_file`] runs one dataset end to end: load, preprocess, fit a
//! shared classifier and one per group, estimate the benefit of splitting
//! on held-out data, and attach finite-sample bounds. [`synth_files`]
//! writes a synthetic two-group dataset with a JSON sidecar of its
//! generator settings, and [`report_csv`] folds a directory of analysis
//! rows into one sorted CSV summary.

mod analyze;
mod report;
mod synth;

pub use analyze::{
    analyze_dataset, analyze_file, analyze_table, AnalysisOutcome, AnalysisReportRow,
    AnalyzeOptions, TvChoice,
};
pub use report::{report_csv, ReportOutcome, SortOrder};
pub use synth::{synth_files, SynthOptions, SynthOutcome};

use std::fmt;

/// An error tagged with the pipeline stage that produced it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub source: splitgain::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub type Result<T> = std::result::Result<T, StageError>;

/// Attaches a stage name to library errors.
pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> Stage<T> for splitgain::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Process exit code for a failure: 2 when the inputs or flags are at
/// fault, 1 for anything internal.
pub fn exit_code(err: &StageError) -> u8 {
    use splitgain::Error;
    let input_fault = matches!(
        err.source,
        Error::Parse { .. }
            | Error::AmbiguousColumnType { .. }
            | Error::Preprocess(_)
            | Error::Io(_)
            | Error::Fetch { .. }
            | Error::InvalidParameter(_)
            | Error::EmptyInput(_)
            | Error::InsufficientSamples { .. }
    );
    if input_fault {
        2
    } else {
        1
    }
}
