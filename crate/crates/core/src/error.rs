use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label set: {0}")]
    InvalidLabelSet(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("incompatible splits {0} and {1}")]
    Incompatible(String, String),

    #[error("label sets differ (r = {0} vs r = {1})")]
    LabelMismatch(usize, usize),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("newick syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate kernel window at grid point {0}")]
    DegenerateWindow(f64),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
