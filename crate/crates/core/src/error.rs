use thiserror::Error;

use crate::groups::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("invalid descriptor: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("the zero element has no type")]
    ZeroElement,

    #[error("element is not a member of its host: {0}")]
    NotMember(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn parse(column: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            reason: reason.into(),
        }
    }
}
