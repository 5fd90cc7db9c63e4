use std::path::PathBuf;

/// Process exit codes, one per failure class.
pub mod exit {
    pub const OK: i32 = 0;
    /// At least one check failed or was inconclusive.
    pub const CHECK_FAILED: i32 = 1;
    /// Bad command line or unknown scenario.
    pub const USAGE: i32 = 2;
    /// Invalid mu or other configuration value.
    pub const CONFIG: i32 = 3;
    /// Graph file missing or malformed.
    pub const GRAPH: i32 = 4;
    /// Output directory or file could not be written.
    pub const OUTPUT: i32 = 5;
    /// The algorithms reported an error while running.
    pub const RUNTIME: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown scenario {0:?}; try `alloc2mech list`")]
    UnknownScenario(String),
    #[error("invalid mu {0}: must lie in (0, 1), and below 1/2 for negative types")]
    InvalidMu(f64),
    #[error("config: {0}")]
    Config(String),
    #[error("graph file {path}: {reason}")]
    Graph { path: PathBuf, reason: String },
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("reading {path}: {source}")]
    Input {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] alloc2mech_core::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownScenario(_) => exit::USAGE,
            Error::InvalidMu(_) | Error::Config(_) | Error::Input { .. } => exit::CONFIG,
            Error::Graph { .. } => exit::GRAPH,
            Error::Output { .. } => exit::OUTPUT,
            Error::Core(alloc2mech_core::Error::InvalidMu(_)) => exit::CONFIG,
            Error::Core(alloc2mech_core::Error::CutEdge(_)) => exit::GRAPH,
            Error::Core(_) => exit::RUNTIME,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
