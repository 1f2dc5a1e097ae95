use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}{}: {message}", line_suffix(*line))]
    Parse {
        origin: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{origin}{}: field `{field}`: {message}", line_suffix(*line))]
    Field {
        origin: String,
        field: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] prepsim::Error),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(":{l}")).unwrap_or_default()
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Read { .. } => "read",
            Self::Write { .. } => "write",
            Self::Parse { .. } => "parse",
            Self::Field { .. } => "invalid-field",
            Self::Usage(_) => "usage",
            Self::Core(_) => "computation",
        }
    }

    /// Machine-readable error report written to stderr by the binary.
    pub fn to_json(&self) -> serde_json::Value {
        let mut err = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            Self::Parse { line, .. } => err["line"] = json!(line),
            Self::Field { field, line, .. } => {
                err["field"] = json!(field);
                err["line"] = json!(line);
            }
            _ => {}
        }
        json!({
            "tool": "prepsim",
            "version": env!("CARGO_PKG_VERSION"),
            "error": err,
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
