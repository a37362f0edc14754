use thiserror::Error;

use crate::flow::Trajectory;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no liquidity-trap steady state: found {found} root(s) of the modified Fisher equation")]
    NoLowSteadyState { found: usize },

    #[error("more than two steady states detected at pi = {roots:?}")]
    MultipleRootsDetected { roots: Vec<f64> },

    #[error("singular branch: denominator of the a-dot=0 locus vanishes near pi = {pi}")]
    SingularBranch { pi: f64 },

    #[error("steady state with non-positive liabilities a = {a} at pi = {pi}")]
    NonpositiveLiabilities { a: f64, pi: f64 },

    #[error("steady state is not a saddle (classification: {0})")]
    NotASaddle(String),

    #[error("wrong classification for this operation: {0}")]
    WrongClassification(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    Stiffness {
        t: f64,
        h: f64,
        partial: Box<Trajectory>,
    },

    #[error("no heteroclinic connection found: {0}")]
    NoConnection(String),

    #[error("configuration error:\n{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the failure is numerical (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoLowSteadyState { .. }
                | Error::MultipleRootsDetected { .. }
                | Error::SingularBranch { .. }
                | Error::NonpositiveLiabilities { .. }
                | Error::NotASaddle(_)
                | Error::WrongClassification(_)
                | Error::Stiffness { .. }
                | Error::NoConnection(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
