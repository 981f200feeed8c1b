use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("case file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A case, schedule or expansion violates one of its invariants.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A demand or germ coordinate lies outside the uncertainty box.
    #[error("period {period}: {message}")]
    OutOfBox { period: usize, message: String },

    #[error("value {value} outside [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numerical instability: {0}")]
    Numerical(String),

    #[error("dispatch infeasible: {0}")]
    Infeasible(String),

    #[error("lp solver: {0}")]
    Solver(String),

    #[error("enumeration guard exceeded: {0}")]
    Size(String),

    #[error("no feasible commitment")]
    NoFeasibleCommitment,

    /// Wraps a model failure with the quadrature node it occurred at.
    #[error("at node {index} {point:?}: {source}")]
    AtNode {
        index: usize,
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for errors caused by a demand outside the surrogate's box,
    /// including ones wrapped with node context.
    pub fn is_out_of_box(&self) -> bool {
        match self {
            Error::OutOfBox { .. } => true,
            Error::AtNode { source, .. } => source.is_out_of_box(),
            _ => false,
        }
    }
}
