use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexRange { vertex: usize, n: usize },

    #[error("{0} vertices requested; at most 64 are supported")]
    TooLarge(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("position budget of {budget} exceeded{}", .k.map(|k| format!(" at k = {k}")).unwrap_or_default())]
    Budget { budget: usize, k: Option<usize> },

    #[error("strategy undefined at {0}")]
    StrategyHole(String),

    #[error("invariant {name} violated: {detail}")]
    Invariant { name: String, detail: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invariant(name: &str, detail: impl Into<String>) -> Self {
        Error::Invariant { name: name.to_string(), detail: detail.into() }
    }

    /// Process exit status: 1 check failure, 2 input error, 3 resource error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::StrategyHole(_) | Error::Invariant { .. } => 1,
            _ => 2,
        }
    }

    pub fn with_k(self, k: usize) -> Self {
        match self {
            Error::Budget { budget, .. } => Error::Budget { budget, k: Some(k) },
            other => other,
        }
    }
}
