use thiserror::Error;

/// Errors produced by the shell toolkit.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Current metric is no longer positive definite at a quadrature point
    /// (element inversion); usually a mesh or continuation step-size failure.
    #[error("geometry: degenerate surface metric (det a = {det:.3e}) at element {element}")]
    DegenerateMetric { element: usize, det: f64 },

    #[error("material: invalid parameter: {0}")]
    InvalidMaterial(String),

    #[error("discretization: {0}")]
    InvalidMesh(String),

    #[error("assembly: over-constrained system (no free dofs remain)")]
    OverConstrained,

    #[error("contact: quadrature gap {gap:.3e} nm below {limit:.3e} nm (penetration)")]
    Penetration { gap: f64, limit: f64 },

    #[error("solver: Newton did not converge after {iterations} iterations (|R| = {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("solver: singular tangent during factorization (pivot {pivot:.3e} at equation {index})")]
    SingularTangent { index: usize, pivot: f64 },

    #[error("solver: eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("solver: continuation stopped at parameter {parameter}: {reason}")]
    ContinuationStopped { parameter: f64, reason: String },

    #[error("analytical: {0}")]
    Analytical(String),
}
