//! Error type shared by all numerical modules.

use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// Variants carry enough context to be shown to a user directly; the CLI maps
/// all of them to the "numeric failure" exit code except where noted there.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scattering function or form factor was evaluated too close to a pole.
    #[error("evaluation at {at} lies within {radius:e} of a declared pole at {pole}")]
    PoleEvaluation { at: String, pole: String, radius: f64 },

    /// Tensor or vector dimensions do not match the grid or truncation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e} > tolerance {tol:e}")]
    QuadratureNonConvergence { a: f64, b: f64, error: f64, tol: f64 },

    /// An operation requiring operators of a given grade received another.
    #[error("grade mismatch: {0}")]
    GradeMismatch(String),

    /// A routine restricted to particular scattering functions was called with another.
    #[error("wrong scattering function: {0}")]
    WrongScatteringFunction(String),

    /// Test-function supports never become wedge-separated.
    #[error("support violation: {0}")]
    SupportViolation(String),

    /// Wave packets are not ordered by rapidity support.
    #[error("ordering violation: {0}")]
    OrderingViolation(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The truncation is too small for the requested particle numbers.
    #[error("truncation overflow: {0}")]
    Truncation(String),

    /// A contour would pass through or too close to another pole.
    #[error("contour through pole: {0}")]
    ContourThroughPole(String),

    /// Richardson extrapolation estimates disagree, typically near a pole.
    #[error("extrapolation diverges: {0}")]
    ExtrapolationDivergence(String),

    /// An element could not be decomposed in the requested algebraic form.
    #[error("decomposition failed: {0}")]
    Decomposition(String),

    /// Elements violate the grading or side requirements of an identity.
    #[error("grade/side violation: {0}")]
    GradeSide(String),

    /// Invalid user-supplied parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
