//! Exact kernels over (0,1)- and small-integer matrices.
//!
//! Bit layout: entry `(i, j)` of an `n x n` [`BitMatrix`] is bit `j` of row `i`
//! and bit `i * n + j` of its integer code. This is the only code format used
//! anywhere in the crate.

mod bit;
mod int;
mod kernels;
pub mod oracle;

pub use bit::{BitMatrix, MAX_DIM};
pub use int::{IntMatrix, MAX_ENTRY};
pub use kernels::{bareiss_i64, det_mod_rows, is_prime};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix dimension {0} is outside the supported range 1..={1}")]
    DimensionOutOfRange(usize, usize),
    #[error("code {code} is outside [0, 2^{bits})")]
    CodeOutOfRange { code: u128, bits: usize },
    #[error("{0}x{0} codes do not fit in 128 bits")]
    CodeTooWide(usize),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("row {row} has {len} entries, expected {n}")]
    RaggedRow { row: usize, len: usize, n: usize },
    #[error("entry {value} at ({row}, {col}) is not allowed here")]
    EntryOutOfRange { row: usize, col: usize, value: i64 },
    #[error("exact arithmetic overflowed 128 bits")]
    Overflow,
    #[error("matrices of dimension {0} and {1} cannot be combined")]
    DimensionMismatch(usize, usize),
}

/// Read access shared by the oracles and the generic kernels.
pub trait Entries {
    fn dim(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> i64;
}
