use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("no matching of size {size} exists (maximum cardinality is {max})")]
    InfeasibleSize { size: usize, max: usize },

    #[error("{what} has {size} elements, limit is {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("analysis requires OPT > 0")]
    ZeroOptimum,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
