use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("basis capacity exceeded: {0}")]
    Capacity(String),

    #[error("degenerate vacuum projection: p_vac = {0:e}")]
    DegenerateProjection(f64),

    #[error("integration accuracy: trace drift {drift:e} at t = {t}; reduce the step factor")]
    IntegrationAccuracy { drift: f64, t: f64 },

    #[error("zero-probability measurement outcome: p = {0:e}")]
    ZeroProbability(f64),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("state is not pure: 1 - tr(rho^2) = {0:e}")]
    NotPure(f64),

    #[error("singular elimination: {0}")]
    Singular(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
