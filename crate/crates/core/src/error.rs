use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("{what} index {index} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("coils intersect or touch: {0}")]
    Intersecting(String),

    #[error("quadrature failed to converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("receive coil count {n_rx} is not a multiple of transmit coil count {n_tx}")]
    NotAMultiple { n_rx: usize, n_tx: usize },

    #[error("matrix is rank deficient: rank {rank}, required {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("invalid pilot: {0}")]
    Pilot(String),

    #[error("invalid correlation matrix: {0}")]
    Correlation(String),

    #[error("s-parameter document: {0}")]
    SParameter(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("sweep: {0}")]
    Sweep(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
