use thiserror::Error;

/// Errors raised by the channel model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    /// A special function or integral left its numerically representable range.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// Exponential input requires v^2 > 2 sigma^2 / m (equivalently m lambda > 2 mu^2).
    #[error("exponential input is undefined in this regime: v^2 must exceed 2 sigma^2 / m")]
    InvalidRegime,

    /// The discretised first-passage simulation did not reach the receiver.
    #[error("no absorption within {steps} steps")]
    StepBudgetExceeded { steps: u64 },

    /// Bracket expansion for the decision threshold was exhausted.
    #[error("decision threshold root not bracketed")]
    RootNotBracketed,

    /// log(p1/p2) is at or above the large-y limit of the LLR, so the
    /// threshold equation has zero or two roots.
    #[error("decision threshold is not unique for log(p1/p2) = {log_prior_ratio} (LLR limit {llr_limit})")]
    AmbiguousThreshold { log_prior_ratio: f64, llr_limit: f64 },

    /// Every hypothesis assigns zero likelihood to the observation.
    #[error("observation is inconsistent with every transmit time in the constellation")]
    InconsistentObservation,

    /// Training sample does not determine the noise parameters.
    #[error("degenerate training sample: {0}")]
    DegenerateSample(&'static str),

    /// Caller-side precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge (estimate {estimate}, error {abs_error})")]
    Quadrature { estimate: f64, abs_error: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be finite and >= 0",
        })
    }
}
