use serde_json::{json, Value};
use sphred::polygon::Violation;
use thiserror::Error;

/// Failures that end a command with exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("document does not match the schema: {0}")]
    Schema(String),
    #[error("invalid polygon: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
    #[error("invalid polygon: {0}")]
    Geometry(String),
    #[error("cannot read input: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("vertices {0:?} face away from the view axis; use --projection stereo")]
    NotVisible(Vec<usize>),
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Schema(_) => "SchemaError",
            CliError::Validation(_) | CliError::Geometry(_) => "ValidationError",
            CliError::Io(_) => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Generation(_) => "GenerationError",
            CliError::NotVisible(_) => "NotVisible",
            CliError::Computation(_) => "ComputationError",
        }
    }

    /// `{"error": {"kind": ..., "message": ..., "violations"?: [...]}}`
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Validation(v) => body["violations"] = json!(v),
            CliError::NotVisible(ix) => body["indices"] = json!(ix),
            _ => {}
        }
        json!({ "error": body })
    }
}
