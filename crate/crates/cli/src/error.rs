//! Process-level error classes. Exit codes are a stable scripting contract:
//! 0 success, 1 data error, 2 usage error.

use reident_core::alluvial::AlluvialError;
use reident_core::community::CommunityError;
use reident_core::evaluation::EvalError;
use reident_core::hints::HintError;
use reident_core::metrics::MetricsError;
use reident_core::partition::PartitionError;
use reident_core::simgen::SimError;

use crate::formats::LedgerParseError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Data(_) => 1,
            AppError::Usage(_) => 2,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<LedgerParseError> for AppError {
    fn from(e: LedgerParseError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<PartitionError> for AppError {
    fn from(e: PartitionError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<MetricsError> for AppError {
    fn from(e: MetricsError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<EvalError> for AppError {
    fn from(e: EvalError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<HintError> for AppError {
    fn from(e: HintError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<CommunityError> for AppError {
    fn from(e: CommunityError) -> Self {
        match e {
            CommunityError::LevelOutOfRange { .. } => AppError::Usage(e.to_string()),
            CommunityError::EmptyGraph => AppError::Data(e.to_string()),
        }
    }
}

impl From<AlluvialError> for AppError {
    fn from(e: AlluvialError) -> Self {
        match e {
            AlluvialError::TooFewAxes { .. } => AppError::Usage(e.to_string()),
            AlluvialError::UniverseMismatch => AppError::Data(e.to_string()),
        }
    }
}

impl From<SimError> for AppError {
    fn from(e: SimError) -> Self {
        AppError::Usage(e.to_string())
    }
}
