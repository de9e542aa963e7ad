use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum GeoError {
    /// Point outside the chart on which the metric or map is defined.
    OutOfDomain { what: &'static str, detail: String },
    /// Metric (or induced metric) failed to be invertible.
    Degenerate(&'static str),
    DimensionMismatch { expected: usize, got: usize },
    DimensionTooSmall { needed: usize, got: usize },
    /// Ladder fits disagree beyond tolerance.
    IllConditionedFit { disagreement: f64 },
    InvalidParameter(String),
    /// The ambient manifold fails the Poincaré–Einstein test at a sample point.
    AmbientNotPE { residual: f64 },
    NotMinimal { mean_curvature: f64 },
    /// Constant mean curvature outside the admissible range `|C| < k + 1`.
    InvalidCMC { c: f64, k: usize },
    InvalidLeeFunction { residual: f64 },
    /// Exponent outside `1 < p < ∞`.
    InvalidP { p: f64 },
    IntegrationFailed(String),
    NotOrthogonal { residual: f64 },
    /// Profile reached `x₁ ≤ 0` at parameter `s`.
    Blowup { s: f64 },
    ToleranceNotMet { residual: f64, tol: f64 },
    /// Negative radicand in the rotation-phase rate.
    ArcLengthViolation { s: f64, value: f64 },
    InsufficientRange { needed: f64, got: f64 },
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::OutOfDomain { what, detail } => write!(f, "{what}: point outside domain ({detail})"),
            GeoError::Degenerate(what) => write!(f, "{what}: degenerate metric"),
            GeoError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            GeoError::DimensionTooSmall { needed, got } => {
                write!(f, "dimension {got} too small (need at least {needed})")
            }
            GeoError::IllConditionedFit { disagreement } => {
                write!(f, "extrapolation ladder disagrees by {disagreement:.3e}")
            }
            GeoError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            GeoError::AmbientNotPE { residual } => {
                write!(f, "ambient metric is not Poincare-Einstein (residual {residual:.3e})")
            }
            GeoError::NotMinimal { mean_curvature } => {
                write!(f, "submanifold is not minimal (|H| = {mean_curvature:.3e})")
            }
            GeoError::InvalidCMC { c, k } => {
                write!(f, "mean curvature {c} outside (-{0}, {0})", k + 1)
            }
            GeoError::InvalidLeeFunction { residual } => {
                write!(f, "field fails Lee-function identities (residual {residual:.3e})")
            }
            GeoError::InvalidP { p } => write!(f, "exponent p = {p} outside (1, inf)"),
            GeoError::IntegrationFailed(msg) => write!(f, "integration failed: {msg}"),
            GeoError::NotOrthogonal { residual } => {
                write!(f, "submanifold does not meet the boundary orthogonally (residual {residual:.3e})")
            }
            GeoError::Blowup { s } => write!(f, "profile reached x1 <= 0 at s = {s}"),
            GeoError::ToleranceNotMet { residual, tol } => {
                write!(f, "residual {residual:.3e} exceeds tolerance {tol:.3e}")
            }
            GeoError::ArcLengthViolation { s, value } => {
                write!(f, "phase rate imaginary at s = {s} (radicand {value:.3e})")
            }
            GeoError::InsufficientRange { needed, got } => {
                write!(f, "profile too short: need x1 > {needed}, reached {got:.3e}")
            }
        }
    }
}

impl core::error::Error for GeoError {}

pub type Result<T> = core::result::Result<T, GeoError>;
