use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible boundary conditions: {0}")]
    Infeasible(String),

    #[error("state {target} not reached before t = {horizon}")]
    NoCrossing { target: f64, horizon: f64 },

    #[error("invalid network spec: {0}")]
    InvalidSpec(String),

    #[error("no connected graph after {attempts} attempts")]
    Disconnected { attempts: usize },

    #[error("normalization {m} too small for payoff difference {diff}")]
    InvalidNormalization { m: f64, diff: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("convergence rate {rate} below threshold {threshold}")]
    NonConvergence { rate: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the `incentive` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::NoCrossing { .. } => 3,
            Error::NonConvergence { .. } => 4,
            _ => 2,
        }
    }
}
