use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("pole sets overlap: rightmost left pole {left} is not below leftmost right pole {right}")]
    PoleCollision { left: f64, right: f64 },
    #[error("argument {z} lies outside the convergence region")]
    Divergent { z: f64 },
    #[error("no convergence: residual {residual:e} exceeds tolerance {tol:e}")]
    NoConvergence { residual: f64, tol: f64 },
    #[error("moment order {s} lies outside the Mellin strip")]
    StripViolation { s: f64 },
    #[error("no asymptotic expansion for this parameter class")]
    NotApplicable,
    #[error("Rice mixture needs more than {max_terms} terms")]
    TruncationOverflow { max_terms: usize },
    #[error("quadrature failed in {stage}: residual {residual:e}")]
    QuadratureFailure { stage: String, residual: f64 },
    #[error("association does not match engine: {0}")]
    InvalidAssociation(String),
    #[error("delta {0} outside (0, 1)")]
    DeltaOutOfRange(f64),
    #[error("parameter singularity: {0}")]
    ParameterSingularity(String),
    #[error("realization has no base station")]
    EmptyRealization,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bad(name: &str, reason: impl Into<String>) -> Error {
    Error::BadParameter { name: name.to_string(), reason: reason.into() }
}
