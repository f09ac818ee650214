//! Exact arithmetic in `F_q`, `F_q[t]` and truncated `F_q((t))`.

mod field;
mod hensel;
mod laurent;
mod poly;

use std::fmt;

use thiserror::Error;

pub use field::{is_prime, Field, FieldDesc, FqElem, MAX_FIELD_ORDER};
pub use hensel::hensel_lift;
pub use laurent::LaurentApprox;
pub use poly::{height, height_tuple, PolyT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadExtensionDegree(u32),
    #[error("field {p}^{a} is too large for table arithmetic")]
    FieldTooLarge { p: u32, a: u32 },
    #[error("operands live in different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field element {0}")]
    BadElement(String),
    #[error("precision exhausted: coefficient of t^{0} is not determined")]
    PrecisionExhausted(i64),
    #[error("insufficient precision: need O(t^{needed}), have O(t^{have})")]
    InsufficientPrecision { needed: i64, have: i64 },
    #[error("residual root hypothesis fails: f(y0) is not 0 mod t")]
    NotARoot,
    #[error("residual root is not simple: f'(y0) is 0 mod t")]
    NonSimpleRoot,
    #[error("coefficient is not integral (valuation {0})")]
    NotIntegral(i64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub(crate) fn check_same(a: &Field, b: &Field) -> Result<(), ArithError> {
    if a == b {
        Ok(())
    } else {
        Err(ArithError::FieldMismatch(a.to_string(), b.to_string()))
    }
}

/// Degree in `t`, with `deg(0) = -∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// An integer extended by `+∞`; used for valuations and precisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub(crate) fn plus(self, k: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + k),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    pub(crate) fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl From<i64> for Valuation {
    fn from(v: i64) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}
