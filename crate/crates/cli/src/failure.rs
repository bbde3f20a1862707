use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Validation,
    Computation,
    Io,
}

/// Error carrying the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Validation, message: message.into() }
    }

    pub fn computation(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Computation, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: FailureKind::Io, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Validation => 2,
            FailureKind::Computation => 3,
            FailureKind::Io => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            FailureKind::Validation => "invalid input",
            FailureKind::Computation => "computation failed",
            FailureKind::Io => "i/o error",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl From<nel_core::Error> for Failure {
    fn from(e: nel_core::Error) -> Self {
        use nel_core::Error;
        let kind = match &e {
            Error::Structure(_) | Error::Domain(_) | Error::Precondition(_) => FailureKind::Validation,
            Error::Computation(_) | Error::Json(_) => FailureKind::Computation,
            Error::Io(_) => FailureKind::Io,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}
