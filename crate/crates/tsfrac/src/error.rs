use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// Scale and expression text errors carry byte offsets into the source
/// string; numeric errors carry the offending values so callers can
/// report them without re-deriving context.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("scale is empty")]
    EmptyScale,

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("point {point} is not in the scale")]
    PointNotInScale { point: f64 },

    #[error("empty range: a = {a} exceeds b = {b}")]
    EmptyRange { a: f64, b: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not differentiable: {0}")]
    NotDifferentiable(String),

    #[error("point {point} is the scale maximum and left-scattered; no forward difference exists there")]
    LeftScatteredMaximum { point: f64 },

    #[error("alpha = {alpha} is outside (0, 1]")]
    InvalidAlpha { alpha: f64 },

    #[error("fractional derivative of order {alpha} is undefined at negative point {point}")]
    NegativePointWithFractionalAlpha { point: f64, alpha: f64 },

    #[error("fractional integral of order {alpha} requires strictly positive scale points; found {point}")]
    NonpositivePointWithFractionalAlpha { point: f64, alpha: f64 },

    #[error("limit at zero did not converge: successive extrapolants differ by {spread}")]
    ZeroLimitUndetermined { spread: f64 },

    #[error("quadrature failed: error estimate {achieved} exceeds tolerance {requested} after exhausting the subdivision budget")]
    QuadratureFailure { achieved: f64, requested: f64 },

    #[error("function is not strictly increasing near {at}")]
    NotMonotone { at: f64 },

    #[error("exponent p = {p} is outside the admissible range for this inequality")]
    InvalidExponent { p: f64 },

    #[error("function vanishes at sampled point {at} (|value| < 1e-12)")]
    FunctionVanishes { at: f64 },

    #[error("weight has negligible integral mass over the range")]
    ZeroWeightMass,

    #[error("sampled second differences have no uniform sign; convexity is indeterminate")]
    ShapeIndeterminate,

    #[error("weight is negative at sampled point {at}: {value}")]
    NegativeWeight { at: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
