use std::fmt;

use crate::instance::ValidationReport;

/// Category of a text-format parse failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownKeyword,
    BadValue,
    MissingField,
    DuplicateField,
    UnknownTask,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SYNTAX",
            ParseErrorKind::UnknownKeyword => "UNKNOWN_KEYWORD",
            ParseErrorKind::BadValue => "BAD_VALUE",
            ParseErrorKind::MissingField => "MISSING_FIELD",
            ParseErrorKind::DuplicateField => "DUPLICATE_FIELD",
            ParseErrorKind::UnknownTask => "UNKNOWN_TASK",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{kind} at line {line}: {message}")]
    Parse {
        kind: ParseErrorKind,
        /// 1-based; 0 when the error is not tied to a line (e.g. a missing field).
        line: usize,
        message: String,
    },

    #[error("periods are not harmonic: {0}")]
    NonHarmonic(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("invalid solution: {0}")]
    InvalidSolution(ValidationReport),

    #[error("unknown task index {0}")]
    UnknownTask(usize),

    #[error("search space too large for exhaustive enumeration (~{0:.3e} candidates)")]
    SpaceTooLarge(f64),

    #[error("unsatisfiable generator parameters: {0}")]
    Generator(String),

    #[error("invalid render settings: {0}")]
    Render(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(kind: ParseErrorKind, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            kind,
            line,
            message: message.into(),
        }
    }

    /// Returns the parse error kind if this is a parse error.
    pub fn parse_kind(&self) -> Option<ParseErrorKind> {
        match self {
            Error::Parse { kind, .. } => Some(*kind),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
