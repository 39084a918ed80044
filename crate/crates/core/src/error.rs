use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero polynomial has no well-defined roots")]
    ZeroPolynomial,

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },

    #[error("a pole of the shifted transfer function lies on the imaginary axis (lambda = {lambda})")]
    RateOnPole { lambda: f64 },

    #[error("query point {re}{im:+}j lies on the Nyquist curve (distance {distance:e})")]
    PointOnCurve { re: f64, im: f64, distance: f64 },

    #[error("winding number did not round to an integer (residue {residue})")]
    NonIntegerWinding { residue: f64 },

    #[error("feedback loop 1 + K W is identically zero")]
    SingularFeedback,

    #[error("an eigenvalue of A + lambda I lies on the imaginary axis")]
    EigOnLine,

    #[error("requested p = {requested} but {found} eigenvalues lie right of Re(s) = -lambda")]
    InertiaMismatch { requested: usize, found: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
