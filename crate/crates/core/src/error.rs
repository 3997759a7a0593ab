use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },

    #[error("edge list parse error on line {line}: {reason}")]
    EdgeList { line: usize, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "invalid Godsil-McKay partition: vertex {vertex} has {count} of {size} neighbours in C"
    )]
    InvalidSwitching {
        vertex: usize,
        count: usize,
        size: usize,
    },

    #[error("invalid Godsil-McKay partition: C does not induce a regular subgraph")]
    IrregularSwitchingSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("feature file error: {0}")]
    Features(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
