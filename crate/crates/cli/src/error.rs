use std::fmt;

use ein_core::Error;
use serde::Serialize;

/// Pipeline stage an error came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Prepare,
    Featurize,
    Train,
    Evaluate,
    Analyze,
    Project,
    Write,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Prepare => "prepare",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Analyze => "analyze",
            Stage::Project => "project",
            Stage::Write => "write",
        }
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

impl StageError {
    pub fn new(stage: Stage, source: Error) -> Self {
        StageError { stage, source }
    }

    /// Process exit code for this failure class: 2 configuration, 3 I/O,
    /// 4 bad input data, 5 numerical failure during training.
    pub fn exit_code(&self) -> i32 {
        if self.stage == Stage::Config {
            return match self.source {
                Error::Io { .. } => 3,
                _ => 2,
            };
        }
        match self.source {
            Error::Config(_) => 2,
            Error::Io { .. } => 3,
            Error::Numeric(_) => 5,
            Error::Parse { .. }
            | Error::Record { .. }
            | Error::Validation(_)
            | Error::Data(_)
            | Error::Json(_) => 4,
        }
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage.as_str(), self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

/// Tags core results with a stage.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T> AtStage<T> for ein_core::Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|e| StageError::new(stage, e))
    }
}

pub(crate) fn io_error(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}
