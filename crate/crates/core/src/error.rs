use alloc::string::String;
use core::fmt;

/// Errors raised by the library layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Deformation parameter was negative or not finite.
    InvalidDeformation(f64),
    /// An index or point lies outside the domain of an operation.
    Domain(String),
    /// A linear system in the coefficient solvers had a vanishing pivot.
    Degenerate { s: u32, i: usize, what: &'static str },
    /// Gram matrix rank did not match the expected weight multiplicity.
    RankMismatch { k: u32, s: u32, expected: usize, found: usize },
    /// Two generator sets or matrices that must agree in size do not.
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    /// The oracle refuses representations above its dimension cap.
    TooLarge { dim: usize, cap: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDeformation(t) => {
                write!(f, "deformation parameter must be finite and nonnegative, got {t}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Degenerate { s, i, what } => {
                write!(f, "degenerate {what} at line s={s}, strand i={i}")
            }
            Error::RankMismatch { k, s, expected, found } => write!(
                f,
                "weight space (k={k}, s={s}) has rank {found}, expected {expected}"
            ),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Error::TooLarge { dim, cap } => {
                write!(f, "dimension {dim} exceeds the oracle cap of {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
