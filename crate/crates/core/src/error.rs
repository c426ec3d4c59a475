use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature nodes must be pairwise distinct (nodes {0} and {1} coincide)")]
    DuplicateNodes(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("operator is not dissipative: eigenvalue {0:e} is positive")]
    NotDissipative(f64),

    #[error("unknown problem `{0}` (expected poly, exp or sine)")]
    UnknownProblem(String),

    #[error("derivative order {requested} exceeds the problem's supplied maximum {max}")]
    TraceOrder { requested: usize, max: usize },

    #[error("step size {step} does not divide the interval length {length}")]
    StepMismatch { step: String, length: String },

    #[error("convergence studies require a problem with a known exact solution")]
    MissingExact,

    #[error("no records to write")]
    EmptyRecords,

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of an inner numerical solver (eigensolver, node solver,
    /// dissipativity check) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NotDissipative(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
