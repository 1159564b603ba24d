use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies outside the chart domain of the geometry")]
    PointOutsideChart,
    #[error("finite-difference stencil leaves the chart domain")]
    StencilOutsideChart,
    #[error("parametrization is not an immersion at the requested parameter")]
    DegenerateImmersion,
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies outside the open unit ball")]
    PointOutsideBall,
    #[error("surface family has no closed-form flat mean curvature")]
    NoClosedForm,
    #[error("domain is not a compact region supported by the quadrature")]
    NotCompactDomain,
    #[error("field violates the traced interior equation (residual {0:e})")]
    TraceSystemViolated(f64),
    #[error("boundary is not umbilic (defect {0:e}); scalar reduction does not apply")]
    UmbilicityRequired(f64),
    #[error("reports do not share one potential basis")]
    BasisMismatch,
    #[error("boundary components intersect or touch (sampled distance {0:e})")]
    ComponentsIntersect(f64),
    #[error("kernel dimension {dim} exceeds the bound {bound}")]
    DimensionBoundViolated { dim: usize, bound: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
