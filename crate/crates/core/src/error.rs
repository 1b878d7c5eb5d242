use thiserror::Error;

/// Errors raised by the integrators, the ensemble driver and the analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("state outside the Bloch disc: x = {x}, z = {z}")]
    OutsideBlochDisc { x: f64, z: f64 },

    #[error("linear entropy is zero; ln s is undefined for a pure state")]
    PureState,

    #[error("quadrature did not converge: estimate {value:e}, error estimate {error:e} after {intervals} intervals")]
    Quadrature {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    RootNotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("Fokker-Planck solver unstable at step {step} (t = {time}): density {value:e} at node {node}")]
    Unstable {
        step: usize,
        time: f64,
        node: usize,
        value: f64,
    },

    #[error("Fokker-Planck survival did not decay below {threshold:e} within {steps} steps (G = {survival:e})")]
    SurvivalNotConverged {
        steps: usize,
        threshold: f64,
        survival: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
