use std::path::PathBuf;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid parameters supplied by the caller.
    Config,
    /// Unreadable, malformed or inconsistent input data.
    Data,
    /// An iterative numerical method failed.
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported sample format in {path}: {format}")]
    Format { path: PathBuf, format: String },

    #[error("dimension mismatch: expected {}x{}, found {}x{}", expected.0, expected.1, found.0, found.1)]
    Geometry {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("image is {width}x{height} but at least {min_width}x{min_height} is required")]
    TooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("bit depth mismatch: {0} vs {1}")]
    BitDepthMismatch(u32, u32),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("value {value} at index {index} lies outside [0, {max}]")]
    ValueRange { index: usize, value: f64, max: f64 },

    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("no included pixels or pairs to accumulate")]
    EmptySupport,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{name} must be positive, got {value}")]
    Domain { name: &'static str, value: f64 },

    #[error("sample {index} ({value}) is not strictly inside the support ({a}, {b})")]
    Support {
        index: usize,
        value: f64,
        a: f64,
        b: f64,
    },

    #[error("insufficient data: need at least {required} samples, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("degenerate scene: all {n} samples equal {mu}")]
    DegenerateScene { n: usize, mu: f64 },

    #[error("degenerate variance: `{0}` is constant")]
    DegenerateVariance(&'static str),

    #[error("optimizer did not converge after {iterations} iterations (alpha = {alpha}, beta = {beta})")]
    Convergence {
        iterations: usize,
        alpha: f64,
        beta: f64,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Domain { .. } => ErrorKind::Config,
            Error::Convergence { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
