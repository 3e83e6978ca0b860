use thiserror::Error;

/// Errors raised by the discretization, the control solvers and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, region or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The explicit scheme would be unstable on this grid.
    #[error("CFL violation: dt = {dt:.6e} exceeds the stable bound {bound:.6e}")]
    Cfl { dt: f64, bound: f64 },

    /// A time-stepper produced a non-finite value.
    #[error("non-finite value during time stepping at time level {level}")]
    Blowup { level: usize },

    /// Conjugate gradient met a non-finite value.
    #[error("non-finite value in conjugate gradient at iteration {iteration}")]
    CgBreakdown { iteration: usize },

    /// Two fields (or a field and a grid) disagree on their shape.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operation was called outside its domain of validity.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown nonlinearity `{0}`")]
    UnknownNonlinearity(String),

    #[error("dense oracle limited to {cap} unknowns, problem has {size}")]
    SizeCap { size: usize, cap: usize },

    #[error("not enough usable records for an order estimate ({usable} usable, need 3)")]
    InsufficientRecords { usable: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
