use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is outside the supported range")]
    UnsupportedDimension(usize),

    #[error("dimension {dim} is too small (at least {min} required)")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("jet of degree {degree} cannot supply derivatives of order {requested}")]
    DegreeExhausted { degree: usize, requested: usize },

    #[error("metric is not positive definite at the point (smallest eigenvalue {min_eigenvalue:e})")]
    SingularMetric { min_eigenvalue: f64 },

    #[error("point {point:?} lies outside the chart domain: {reason}")]
    OutOfDomain { point: Vec<f64>, reason: String },

    #[error("instance has no potential function")]
    MissingPotential,

    #[error("critical point: |grad f| = {grad_norm:e} is below the regular threshold {threshold:e}")]
    CriticalPoint { grad_norm: f64, threshold: f64 },

    #[error("precondition unmet for {check}: {detail}")]
    PreconditionUnmet { check: &'static str, detail: String },

    #[error("radial eigenvalue routes disagree: formula {formula:e} vs Rayleigh quotient {rayleigh:e}")]
    RouteDisagreement { formula: f64, rayleigh: f64 },

    #[error("instance is not tagged as a warped product")]
    NotWarped,

    #[error("rho = {rho} is the Schouten value 1/(2(n-1)) for n = {n}; the warped-product ODE is singular there")]
    SchoutenSingular { rho: f64, n: usize },

    #[error("rho = {rho} is the traceless value 1/n for n = {n}; tip data cannot fix the tip curvature")]
    TipDegenerate { rho: f64, n: usize },

    #[error("integration step {dt:e} underflows at t = {t}")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("warped profile collapsed (h = {h:e}) at t = {t}")]
    Collapse { t: f64, h: f64 },

    #[error("profile is too sparse for embedding: step {dt:e} exceeds {max:e}")]
    SparseProfile { dt: f64, max: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownExample(String),
}
