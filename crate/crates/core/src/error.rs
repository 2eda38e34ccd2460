use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its physical constraint.
    #[error("invalid parameter `{key}`: {constraint}")]
    InvalidParameter {
        key: &'static str,
        constraint: &'static str,
    },

    /// Evaluation point lies outside the model's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters are valid individually but break an assumption of the analysis.
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("flux reached the saturation margin at t = {t} s (phi = {phi} Wb)")]
    FluxDomainBreach { t: f64, phi: f64 },

    #[error("step size underflow at t = {t} s (h = {h} s)")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("event localization did not converge near t = {t} s")]
    EventLocalization { t: f64 },

    #[error("{jumps} jumps without time progress at t = {t} s")]
    Chattering { t: f64, jumps: usize },

    #[error("nonlinear solve failed: {0}")]
    NoConvergence(String),

    #[error("eigenvalue computation failed: {0}")]
    EigenSolver(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::ModelInconsistency(_) | Error::Precondition(_)
        )
    }
}
