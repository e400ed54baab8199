use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    /// Bad flags, values or config; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Exit code 3.
    #[error("external solver unavailable: {0}")]
    SolverUnavailable(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failed(String),
}

impl WorkbenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkbenchError::Usage(_) => 2,
            WorkbenchError::SolverUnavailable(_) => 3,
            WorkbenchError::Io(_) | WorkbenchError::Failed(_) => 1,
        }
    }
}

pub fn usage(e: impl std::fmt::Display) -> WorkbenchError {
    WorkbenchError::Usage(e.to_string())
}

impl From<gleeok_milp::MilpError> for WorkbenchError {
    fn from(e: gleeok_milp::MilpError) -> Self {
        use gleeok_milp::MilpError as M;
        match e {
            M::SolverUnavailable(m) => WorkbenchError::SolverUnavailable(m),
            M::SolverFailed { .. } | M::Io(_) | M::Solution { .. } => {
                WorkbenchError::Failed(e.to_string())
            }
            other => WorkbenchError::Usage(other.to_string()),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for WorkbenchError {
            fn from(e: $t) -> Self {
                WorkbenchError::Usage(e.to_string())
            }
        }
    )*};
}

usage_from!(
    gleeok_cipher::CipherError,
    gleeok_cipher::ParseHexError,
    gleeok_sbox::SboxError,
    gleeok_degree::DegreeError,
    gleeok_stats::StatsError,
    gleeok_attack::AttackError,
    gleeok_linlayer::LinLayerError,
    toml::de::Error
);
