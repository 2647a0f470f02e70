use thiserror::Error;

/// Errors produced by the solver and verification kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("fractional order alpha = {0} is outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("regularity exponent sigma = {0} is outside (0, 1) ∪ (1, 2]")]
    InvalidSigma(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("history of length {have} requires weights through index {needed}, only {cover} available")]
    WeightCoverage {
        have: usize,
        needed: usize,
        cover: usize,
    },

    #[error("series did not converge within {terms} terms (argument outside supported range)")]
    SeriesDivergence { terms: usize },

    #[error("linear solve residual {residual:.3e} exceeds target {target:.3e}")]
    ResidualTooLarge { residual: f64, target: f64 },

    #[error("Newton iteration did not converge within {max_iter} iterations (last update {last_update:.3e})")]
    NewtonDiverged { max_iter: usize, last_update: f64 },

    #[error("tau = {tau:.6e} is not below the Grönwall threshold tau* = {tau_star:.6e}")]
    TauAboveThreshold { tau: f64, tau_star: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("time step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::StepFailed {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
