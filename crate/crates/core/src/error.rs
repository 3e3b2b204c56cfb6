//! Structured failure information carried on the failure track of a flow.

use std::any::Any;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum length of a cause chain, counting the head.
pub const MAX_CAUSE_DEPTH: usize = 32;

/// Classification of a failure for programmatic handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorKind {
    ToolNotFound,
    ToolExecution,
    StepFault,
    EmptyGather,
    Decode,
    Other,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::ToolNotFound => "tool-not-found",
            ErrorKind::ToolExecution => "tool-execution",
            ErrorKind::StepFault => "step-fault",
            ErrorKind::EmptyGather => "empty-gather",
            ErrorKind::Decode => "decode",
            ErrorKind::Other => "other",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Failure description: a non-empty message, a kind, and an optional
/// upstream cause. Cause chains never exceed [`MAX_CAUSE_DEPTH`] links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorInfo {
    message: String,
    kind: ErrorKind,
    cause: Option<Box<ErrorInfo>>,
}

impl ErrorInfo {
    /// An empty message is replaced by `"<kind> error"`.
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        let mut message = message.into();
        if message.trim().is_empty() {
            message = format!("{kind} error");
        }
        Self {
            message,
            kind,
            cause: None,
        }
    }

    pub fn tool_not_found(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::ToolNotFound, message)
    }

    pub fn tool_execution(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::ToolExecution, message)
    }

    pub fn step_fault(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::StepFault, message)
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Other, message)
    }

    /// Builds a `StepFault` from a panic payload captured by `catch_unwind`.
    pub fn from_panic(payload: Box<dyn Any + Send>) -> Self {
        let detail = if let Some(s) = payload.downcast_ref::<&'static str>() {
            (*s).to_string()
        } else if let Some(s) = payload.downcast_ref::<String>() {
            s.clone()
        } else {
            "non-string panic payload".to_string()
        };
        Self::step_fault(format!("step panicked: {detail}"))
    }

    /// Attaches `cause` as the upstream error. Links past
    /// [`MAX_CAUSE_DEPTH`] are dropped from the deep end of the chain.
    pub fn caused_by(mut self, cause: ErrorInfo) -> Self {
        self.cause = Some(Box::new(cause));
        self.truncate_chain();
        self
    }

    fn truncate_chain(&mut self) {
        let mut depth = 1;
        let mut link = &mut self.cause;
        while let Some(next) = link {
            depth += 1;
            if depth >= MAX_CAUSE_DEPTH {
                next.cause = None;
                break;
            }
            link = &mut next.cause;
        }
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn cause(&self) -> Option<&ErrorInfo> {
        self.cause.as_deref()
    }

    /// Number of links in the chain, including `self`.
    pub fn depth(&self) -> usize {
        1 + self.cause().map_or(0, ErrorInfo::depth)
    }
}

impl fmt::Display for ErrorInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)?;
        if let Some(cause) = self.cause() {
            write!(f, " (caused by {cause})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ErrorInfo {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        self.cause
            .as_deref()
            .map(|c| c as &(dyn std::error::Error + 'static))
    }
}
