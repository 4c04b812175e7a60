use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A target echo (plus pulse support) falls outside the fast-time gate.
    #[error(
        "fast-time gate too narrow: target {target} at slow-time index {slow_index} \
         has delay {delay:.6e} s outside [{gate_start:.6e}, {gate_end:.6e}] s (with pulse support)"
    )]
    GateTooNarrow {
        target: usize,
        slow_index: usize,
        delay: f64,
        gate_start: f64,
        gate_end: f64,
    },

    #[error("carrier aliased: omega0 * dt = {phase_step:.4} rad per sample, must be below pi")]
    CarrierAliased { phase_step: f64 },

    #[error("invalid lowpass filter: {0}")]
    InvalidFilter(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("insufficient sweep: {0}")]
    InsufficientSweep(String),

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("RPCA did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    MaxIterationsExceeded { iterations: usize, residual: f64 },

    #[error("RPCA failed in window {window}: {source}")]
    Window {
        window: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix of shape {rows}x{cols} does not match scenario shape {expected_rows}x{expected_cols}")]
    MismatchedScenario {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps an I/O error with the path it concerns.
    pub fn file(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::File { path, source }
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Json { .. }
            | Error::Io(_)
            | Error::File { .. }
            | Error::Csv(_)
            | Error::Format(_)
            | Error::InvalidInput(_)
            | Error::MismatchedScenario { .. } => 1,
            Error::GateTooNarrow { .. }
            | Error::CarrierAliased { .. }
            | Error::InvalidFilter(_)
            | Error::DegenerateGeometry(_)
            | Error::InsufficientSweep(_) => 2,
            Error::SvdFailure | Error::MaxIterationsExceeded { .. } => 3,
            Error::Window { source, .. } => source.exit_code(),
        }
    }
}
