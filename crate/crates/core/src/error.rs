use thiserror::Error;

/// Failure modes of the geometric solvers.
///
/// Numeric payloads are widened to `f64` so the error type does not depend on
/// the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value while evaluating {what}")]
    NonFinite { what: &'static str },

    #[error("metric is not positive definite at the queried point")]
    MetricDegenerate,

    #[error("metric matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    MetricAsymmetric { asymmetry: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("singular matrix")]
    Singular,

    #[error("point {radius:.6} from chart center leaves the chart ball of radius {chart_radius}")]
    OutsideChart { radius: f64, chart_radius: f64 },

    #[error("geodesic leaves the chart at parameter t = {t:.6}")]
    ChartExit { t: f64 },

    #[error("geodesic boundary-value problem failed after {iterations} iterations (residual {residual:e})")]
    BvpFailure { residual: f64, iterations: usize },

    #[error("degenerate simplex (condition number {condition:e})")]
    DegenerateSimplex { condition: f64 },

    #[error("stepsize inversion failed (residual {residual:e} after {iterations} iterations)")]
    InversionFailure { residual: f64, iterations: usize },

    #[error("singular stepsize Jacobian during inversion")]
    DegenerateConfiguration,

    #[error("stepsize vector invalid: {0}")]
    InvalidStepsize(String),

    #[error("cannot certify bound: {failed} of {total} targets are not covered")]
    CannotCertify { failed: usize, total: usize },
}

pub type Result<T, E = GeoError> = std::result::Result<T, E>;
