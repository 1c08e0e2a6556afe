use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps [`Error::NoConvergence`] to exit code 2 and everything else
/// to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("gauge breaks positivity")]
    GaugeBreaksPositivity,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("interpolation inconsistency: residual {residual:.3e} above threshold {threshold:.3e}")]
    InterpolationInconsistency { residual: f64, threshold: f64 },

    #[error("non-Harnack boundary: {0}")]
    NonHarnackBoundary(String),

    #[error("point ({x}, {y}) is outside the amoeba")]
    OutsideAmoeba { x: f64, y: f64 },

    #[error("hole assignment failed: {0}")]
    HoleAssignmentFailed(String),

    #[error("different boundary data")]
    DifferentBoundaryData,

    #[error("parametrization degenerate: {0}")]
    ParametrizationDegenerate(String),

    #[error("not isoradial")]
    NotIsoradial,

    #[error("singular point: singular values {smallest:.3e}, {second:.3e}")]
    SingularPoint { smallest: f64, second: f64 },

    #[error("divisor count mismatch: found {found}, expected {expected} ({detail})")]
    DivisorCount { found: usize, expected: usize, detail: String },

    #[error("no convergence: {what} (residual {residual:.3e} after {iterations} iterations)")]
    NoConvergence { what: String, residual: f64, iterations: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code for this error: 2 for numerical non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 2,
            _ => 1,
        }
    }

    /// Short machine-readable tag, used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::GaugeBreaksPositivity => "gauge_breaks_positivity",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::InterpolationInconsistency { .. } => "interpolation_inconsistency",
            Error::NonHarnackBoundary(_) => "non_harnack_boundary",
            Error::OutsideAmoeba { .. } => "outside_amoeba",
            Error::HoleAssignmentFailed(_) => "hole_assignment_failed",
            Error::DifferentBoundaryData => "different_boundary_data",
            Error::ParametrizationDegenerate(_) => "parametrization_degenerate",
            Error::NotIsoradial => "not_isoradial",
            Error::SingularPoint { .. } => "singular_point",
            Error::DivisorCount { .. } => "divisor_count",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
