use std::fmt;

/// Errors raised by parsing and by the reasoning procedures.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("not an ELIQ: {0}")]
    NotAnEliq(String),

    #[error("query is unsatisfiable w.r.t. the ontology: {0}")]
    Unsatisfiable(String),

    #[error("unsupported dialect `{dialect}` for {operation}")]
    UnsupportedDialect {
        dialect: String,
        operation: &'static str,
    },

    #[error("not_f_restricted: ontology violates the functionality restriction: {}", .violations.join("; "))]
    NotFRestricted { violations: Vec<String> },

    #[error("a seed query is required: {0}")]
    SeedRequired(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::NotAnEliq(_) => "not_an_eliq",
            Error::Unsatisfiable(_) => "unsatisfiable",
            Error::UnsupportedDialect { .. } => "unsupported_dialect",
            Error::NotFRestricted { .. } => "not_f_restricted",
            Error::SeedRequired(_) => "seed_required",
            Error::UnknownFixture(_) => "unknown_fixture",
            Error::Invariant(_) => "invariant",
        }
    }

    pub(crate) fn syntax(line: usize, column: usize, message: impl fmt::Display) -> Error {
        Error::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
