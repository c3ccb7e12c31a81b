use crate::field::Representation;
use thiserror::Error;

/// Errors produced by the numerical kernels and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field is in the {found:?} representation, expected {expected:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("band {band} exceeds the grid Nyquist frequency {nyquist}")]
    BandExceedsNyquist { band: f64, nyquist: f64 },

    #[error("homogeneous Sobolev norm with s = {s} needs a mean-zero field")]
    SingularDatum { s: f64 },

    #[error("cube partition needs 2L integer and N a multiple of the cube count, got N = {n}, L = {l}")]
    Partition { n: usize, l: f64 },

    #[error("block index {index} outside the bank range")]
    BlockIndexOutOfRange { index: usize },

    #[error("t = {t} is not a node of the time grid")]
    NotATimeNode { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Picard iteration stopped contracting (last ratios {ratios:?})")]
    NonContraction { history: Vec<f64>, ratios: Vec<f64> },

    #[error("Picard iteration did not converge within {max_iter} sweeps (last difference {last:e})")]
    MaxIterExceeded { max_iter: usize, last: f64 },

    #[error("L2 norm grew beyond the abort threshold at step {step}")]
    StepBlowup { step: usize },

    #[error("non-finite values produced in {context}")]
    NonFinite { context: String },

    #[error("unknown norm identifier {0:?}")]
    UnknownNorm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonContraction { .. }
            | Error::MaxIterExceeded { .. }
            | Error::StepBlowup { .. }
            | Error::NonFinite { .. } => 3,
            Error::Io(_) | Error::Snapshot(_) => 4,
            _ => 2,
        }
    }
}
