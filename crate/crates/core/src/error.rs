//! Crate-wide error type.
//!
//! Two broad classes matter to callers: *input* errors (the request is
//! malformed or asks for something the model cannot represent) and
//! *numerical* errors (the computation was attempted and failed to converge
//! or lost accuracy).  The command-line front end maps these to exit codes 2
//! and 3 respectively.

/// Errors produced by the construction and solver routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad parameters, degenerate graphs,
    /// unparseable configuration).
    #[error("invalid input: {0}")]
    Input(String),

    /// A scan step too coarse for the requested resolution; the caller must
    /// refine the step, not the solver.
    #[error("scan step too coarse: {0}")]
    GridTooCoarse(String),

    /// The requested energy is one at which the quantity is undefined
    /// (decoration Dirichlet energy, eigenvalue of the full operator, ...).
    #[error("excluded energy: {0}")]
    ExcludedEnergy(String),

    /// The problem exceeds the configured dense-solver dimension cap.
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    /// A numerical procedure failed to converge or produced an inconsistent
    /// result that validation refused to pass on.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn grid_too_coarse(msg: impl Into<String>) -> Self {
        Error::GridTooCoarse(msg.into())
    }

    pub fn excluded_energy(msg: impl Into<String>) -> Self {
        Error::ExcludedEnergy(msg.into())
    }

    pub fn dimension_cap(msg: impl Into<String>) -> Self {
        Error::DimensionCap(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code the front end reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::GridTooCoarse(_)
            | Error::ExcludedEnergy(_)
            | Error::DimensionCap(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
