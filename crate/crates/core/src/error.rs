use thiserror::Error;

use crate::latin::LatinError;
use crate::matrix::MatrixError;
use crate::perm::PermError;
use crate::poly::PolyError;
use crate::shifted::ShiftError;
use crate::sums::SumError;

/// Any failure of the library, grouped by [`ErrorClass`] for callers that
/// need a coarse outcome (the CLI maps classes to exit codes).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Latin(#[from] LatinError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    InvalidArgument,
    ResourceCap,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Latin(LatinError::OrderAboveCap { .. })
            | Error::Sum(SumError::ResourceCap { .. })
            | Error::Poly(PolyError::ResourceCap { .. })
            | Error::Shift(ShiftError::FullSweepTooLarge(_)) => ErrorClass::ResourceCap,
            Error::Matrix(MatrixError::Overflow)
            | Error::Sum(SumError::Overflow)
            | Error::Sum(SumError::NotDivisible { .. })
            | Error::Poly(PolyError::Overflow) => ErrorClass::Internal,
            _ => ErrorClass::InvalidArgument,
        }
    }
}
