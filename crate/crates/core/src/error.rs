use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
///
/// Several variants are not bugs but physically meaningful outcomes (a state
/// annihilated by loss, a measurement whose signal vanishes). Sweeps record
/// those as gaps using [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows} rows, row of length {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} outside supported range 1..={max}", max = crate::linalg::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("initial state is not normalized (norm squared {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("state annihilated by evolution (K = {k})")]
    KCollapse { k: f64 },

    #[error("quantity expected to be real has imaginary residue {residue}")]
    NonReal { residue: f64 },

    #[error("QFI evaluated to {value}, below the roundoff clamp")]
    NegativeQfi { value: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome {index} has vanishing probability but derivative {derivative}")]
    SingularOutcome { index: usize, derivative: f64 },

    #[error("measurement operator is not Hermitian (deviation {deviation})")]
    NonHermitianMeasurement { deviation: f64 },

    #[error("both deviation vectors vanish; the optimality condition is vacuous")]
    Degenerate,

    #[error("signal derivative {derivative} vanishes; theta is locally unidentifiable")]
    ZeroSignal { derivative: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("regime mismatch: operation requires {expected}, parameters are {found}")]
    RegimeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("eigenvectors coalesce at the exceptional point")]
    EpCoalescence,

    #[error("xi^2 = {xi_sq} < 0: outside the effective one-excitation model")]
    BrokenRegime { xi_sq: f64 },

    #[error("closed-form denominator vanishes ({value})")]
    ZeroDenominator { value: f64 },

    #[error("invalid sweep spec field `{field}`: {message}")]
    Spec { field: String, message: String },
}

impl Error {
    /// Stable machine-readable tag, used for sweep gap markers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::NotSquare { .. } => "NOT_SQUARE",
            Error::UnsupportedDimension(_) => "UNSUPPORTED_DIMENSION",
            Error::NonFinite(_) => "NON_FINITE",
            Error::NotNormalized { .. } => "NOT_NORMALIZED",
            Error::KCollapse { .. } => "K_COLLAPSE",
            Error::NonReal { .. } => "NONREAL",
            Error::NegativeQfi { .. } => "NEGATIVE_QFI",
            Error::InvalidPovm(_) => "INVALID_POVM",
            Error::SingularOutcome { .. } => "SINGULAR_OUTCOME",
            Error::NonHermitianMeasurement { .. } => "NON_HERMITIAN_MEASUREMENT",
            Error::Degenerate => "DEGENERATE",
            Error::ZeroSignal { .. } => "ZERO_SIGNAL",
            Error::InvalidParams(_) => "INVALID_PARAMS",
            Error::RegimeMismatch { .. } => "REGIME_MISMATCH",
            Error::EpCoalescence => "EP_COALESCENCE",
            Error::BrokenRegime { .. } => "BROKEN_REGIME",
            Error::ZeroDenominator { .. } => "ZERO_DENOMINATOR",
            Error::Spec { .. } => "SPEC",
        }
    }

    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }
}
