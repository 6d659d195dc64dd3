use thiserror::Error;

/// Errors produced while loading instances, building models or solving them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error{}: {message}", location(*line, field.as_deref()))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("robot {robot} cannot reach its goal")]
    Unreachable { robot: usize },

    #[error("encoding is infeasible: {0}")]
    EmptyLayer(String),

    #[error("oracle limit exceeded: {0}")]
    OracleCap(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn location(line: Option<usize>, field: Option<&str>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" at line {l}, field `{f}`"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(f)) => format!(" in field `{f}`"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn field(field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
