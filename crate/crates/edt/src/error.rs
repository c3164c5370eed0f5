use thiserror::Error;

pub type Result<T> = std::result::Result<T, EdtError>;

#[derive(Debug, Error)]
pub enum EdtError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("loop edge at vertex `{vertex}`")]
    LoopEdge { vertex: String },

    #[error("{what} cap of {cap} exceeded")]
    CapExceeded { what: String, cap: usize },

    #[error("{what}: size {size} exceeds gate {gate}")]
    GateExceeded { what: String, size: usize, gate: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal verification failure: {0}")]
    Verification(String),

    #[error("input is not planar")]
    NonPlanar,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl EdtError {
    pub fn cap(what: &str, cap: usize) -> Self {
        EdtError::CapExceeded {
            what: what.into(),
            cap,
        }
    }

    pub fn gate(what: &str, size: usize, gate: usize) -> Self {
        EdtError::GateExceeded {
            what: what.into(),
            size,
            gate,
        }
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        EdtError::Precondition(msg.into())
    }

    /// Stable process exit codes: 2 for exceeded caps and gates, 3 for
    /// internal verification failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            EdtError::CapExceeded { .. } | EdtError::GateExceeded { .. } => 2,
            EdtError::Verification(_) => 3,
            _ => 1,
        }
    }
}
