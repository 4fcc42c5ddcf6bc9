use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network parameters: {0}")]
    InvalidParams(String),

    #[error("invalid traffic matrix: {0}")]
    InvalidTraffic(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid path for flow {src}->{dst}: {reason}")]
    InvalidPath {
        src: usize,
        dst: usize,
        reason: String,
    },

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("topology is not node-symmetric")]
    Asymmetric,

    #[error("flow {src}->{dst} cannot be served by any topology in the sequence")]
    Unserved { src: usize, dst: usize },

    #[error("stage {stage} round {round} is not contention-free ({violations} violations)")]
    Contention {
        stage: usize,
        round: usize,
        violations: usize,
    },

    #[error("flow {src}->{dst}: served {served} chunks, demand is {demanded}")]
    Conservation {
        src: usize,
        dst: usize,
        served: u64,
        demanded: u64,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("simulation deadlock with {pending} undelivered chunks")]
    Deadlock { pending: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
