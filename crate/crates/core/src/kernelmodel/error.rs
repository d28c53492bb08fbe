use crate::linalg::LinalgError;
use crate::specfun::SpecfunError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("profile value {value} at t = {t} lies outside [0, 1]")]
    ProfileRange { t: f64, value: f64 },
    #[error("eigenvalue quadrature did not settle below {tol:e} by order {order}")]
    Quadrature { order: usize, tol: f64 },
    #[error("regularity fit needs at least {needed} nonzero eigenvalues, found {found}")]
    TooFewEigenvalues { needed: usize, found: usize },
    #[error("degenerate regularity fit: fewer than two distinct |λ| values in the window")]
    DegenerateFit,
    #[error("no candidate class for the fitted {family} decay")]
    NoCandidate { family: &'static str },
    #[error("profile table {path}: {message}")]
    ProfileTable { path: String, message: String },
    #[error("kernel {0} has no pointwise evaluator")]
    NoEvaluator(String),
}
