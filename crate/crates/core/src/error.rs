use alloc::string::String;
use core::fmt;

/// Errors raised by the algebra, factorization and KP routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live in incompatible coefficient rings or truncation windows.
    RingMismatch(String),
    /// Antiderivative requested for a periodic element with non-zero mean.
    NonZeroMean { mean: String },
    NotAUnit,
    /// The coefficient ring does not provide the requested operation.
    UnsupportedRing(&'static str),
    /// Operator coefficients are not reliable down to the order needed.
    InsufficientDepth { needed: i64, reliable: i64 },
    /// `order(P_i) > i` in an exponential generator.
    OrderViolation { index: u32, order: i64 },
    NotInvertibleAtZero,
    /// Input is not a member of the required group or subalgebra.
    PredicateViolation(String),
    /// The dressing recursion hit a right-hand side with non-zero mean.
    DressingObstruction { step: usize, mean: String },
    InsufficientKMax { needed: u32, got: u32 },
    /// A check loses more `t`-valuation than the series carries.
    ValuationWindow { needed: u32, v_max: u32 },
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RingMismatch(s) => write!(f, "ring mismatch: {s}"),
            Error::NonZeroMean { mean } => write!(f, "non-zero mean {mean}"),
            Error::NotAUnit => f.write_str("element is not a unit"),
            Error::UnsupportedRing(op) => write!(f, "ring does not support {op}"),
            Error::InsufficientDepth { needed, reliable } => {
                write!(f, "need coefficients down to order {needed}, reliable only to {reliable}")
            }
            Error::OrderViolation { index, order } => {
                write!(f, "generator {index} has order {order} > {index}")
            }
            Error::NotInvertibleAtZero => f.write_str("constant term is not invertible"),
            Error::PredicateViolation(s) => write!(f, "predicate violated: {s}"),
            Error::DressingObstruction { step, mean } => {
                write!(f, "dressing step {step}: right-hand side has non-zero mean {mean}")
            }
            Error::InsufficientKMax { needed, got } => {
                write!(f, "kMax = {got}, need at least {needed}")
            }
            Error::ValuationWindow { needed, v_max } => {
                write!(f, "vMax = {v_max}, need at least {needed}")
            }
            Error::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RingMismatch(_) => "ring_mismatch",
            Error::NonZeroMean { .. } => "non_zero_mean",
            Error::NotAUnit => "not_a_unit",
            Error::UnsupportedRing(_) => "unsupported_ring",
            Error::InsufficientDepth { .. } => "insufficient_depth",
            Error::OrderViolation { .. } => "order_violation",
            Error::NotInvertibleAtZero => "not_invertible_at_zero",
            Error::PredicateViolation(_) => "predicate_violation",
            Error::DressingObstruction { .. } => "non_zero_mean",
            Error::InsufficientKMax { .. } => "insufficient_kmax",
            Error::ValuationWindow { .. } => "valuation_window",
            Error::Parse(_) => "parse_error",
        }
    }
}
