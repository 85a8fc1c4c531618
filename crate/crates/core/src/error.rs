//! Error type shared by every engine stage.

use std::fmt;

/// Everything that can go wrong between parsing a spec and emitting a result.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    /// Potential or channel parameters outside the admissible ranges.
    InvalidSpec(String),
    /// A bracketing root search could not enclose its target.
    BracketFailure(String),
    /// Direct integration asked to start where the potential no longer dominates.
    StartTooLate(String),
    /// Adaptive stepper drove the step size below the representable floor.
    StiffnessFailure(String),
    /// Malformed input text (config JSON, CLI arguments).
    Parse(String),
    /// Filesystem trouble while reading specs or writing outputs.
    Io(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::InvalidSpec(m) => write!(f, "invalid spec: {m}"),
            EngineError::BracketFailure(m) => write!(f, "bracket failure: {m}"),
            EngineError::StartTooLate(m) => write!(f, "start too late: {m}"),
            EngineError::StiffnessFailure(m) => write!(f, "stiffness failure: {m}"),
            EngineError::Parse(m) => write!(f, "parse error: {m}"),
            EngineError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl EngineError {
    /// Stable machine-readable tag, used by the CLI error JSON and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::InvalidSpec(_) => "invalid_spec",
            EngineError::BracketFailure(_) => "bracket_failure",
            EngineError::StartTooLate(_) => "start_too_late",
            EngineError::StiffnessFailure(_) => "stiffness_failure",
            EngineError::Parse(_) => "parse",
            EngineError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for EngineError {
    fn from(e: std::io::Error) -> Self {
        EngineError::Io(e.to_string())
    }
}
