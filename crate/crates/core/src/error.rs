use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidModelSpec(String),

    #[error("point {coords:?} is outside the domain of {model}")]
    PointOutOfDomain { model: String, coords: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tangent vectors are attached to different base points")]
    BaseMismatch,

    #[error("trajectory left the model domain at t = {t}")]
    DomainExit { t: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("shooting did not converge after {iterations} iterations (residual {residual:e})")]
    ShootingNoConvergence { iterations: usize, residual: f64 },

    #[error("quadrature node at t = {t} could not be evaluated: {source}")]
    QuadratureFailure { t: f64, source: Box<Error> },

    #[error("no closed-form oracle divergence for model {0}")]
    OracleUnavailable(String),

    #[error("finite-difference stencil around {coords:?} leaves the domain")]
    StencilOutOfDomain { coords: Vec<f64> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn at_node(self, t: f64) -> Error {
        match self {
            e @ Error::QuadratureFailure { .. } => e,
            e => Error::QuadratureFailure {
                t,
                source: Box::new(e),
            },
        }
    }

    /// True for failures that come from the geodesic boundary-value solve
    /// (or from leaving the chart during one), as opposed to bad input.
    pub fn is_shooting_failure(&self) -> bool {
        match self {
            Error::ShootingNoConvergence { .. }
            | Error::DomainExit { .. }
            | Error::IntegrationFailure { .. }
            | Error::StencilOutOfDomain { .. } => true,
            Error::QuadratureFailure { source, .. } => source.is_shooting_failure(),
            _ => false,
        }
    }
}
