use thiserror::Error;

/// Everything that can go wrong in the toolkit.
///
/// Validation errors (bad parameters, violated hypotheses) are kept apart from
/// numerical failures so the CLI can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("m must be even (got m = {0})")]
    OddM(i64),
    #[error("m must be at least 2 (got m = {0})")]
    MTooSmall(i64),
    #[error("k must be at least 1 (got k = {0})")]
    KTooSmall(i64),
    #[error("qtilde must exceed Q = {q} (got {qtilde})")]
    QtildeTooSmall { q: f64, qtilde: f64 },
    #[error("radius must be non-negative (got r = {0})")]
    NegativeRadius(f64),
    #[error("radius must be positive (got r = {0}); the density has a pole at the origin")]
    NonPositiveRadius(f64),
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("recurrence pole: l - 2i*lambda vanishes at l = {ell}")]
    RecurrencePole { ell: usize },
    #[error("series/ODE branches disagree: {0}")]
    BranchMismatch(String),
    #[error("truncation error too large: {0}")]
    Truncation(String),
    #[error("integrand not integrable: {0}")]
    Integrability(String),
    #[error("resolution cap exceeded: {0}")]
    Resolution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::OddM(_)
                | Error::MTooSmall(_)
                | Error::KTooSmall(_)
                | Error::QtildeTooSmall { .. }
                | Error::NegativeRadius(_)
                | Error::NonPositiveRadius(_)
                | Error::Singularity(_)
                | Error::RecurrencePole { .. }
                | Error::Integrability(_)
                | Error::Precondition(_)
                | Error::Invalid(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
