use serde::{Deserialize, Serialize};

use super::kernels::{bareiss_checked, ryser_checked};
use super::{BitMatrix, Entries, MatrixError, MAX_DIM};

/// Entry magnitude bound accepted at construction.
pub const MAX_ENTRY: i64 = 1 << 16;

/// A small dense integer matrix with exact, overflow-checked kernels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(MatrixError::DimensionOutOfRange(n, MAX_DIM));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v.abs() > MAX_ENTRY {
                    return Err(MatrixError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                entries.push(v);
            }
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn filled(n: usize, value: i64) -> Result<Self, MatrixError> {
        Self::from_rows(&vec![vec![value; n]; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn permanent(&self) -> Result<i128, MatrixError> {
        ryser_checked(self)
    }

    pub fn determinant(&self) -> Result<i128, MatrixError> {
        bareiss_checked(self)
    }
}

impl Entries for IntMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> i64 {
        self.get(i, j)
    }
}

impl From<&BitMatrix> for IntMatrix {
    fn from(b: &BitMatrix) -> Self {
        let n = b.dim();
        let entries = (0..n * n).map(|c| b.get(c / n, c % n) as i64).collect();
        IntMatrix { n, entries }
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = MatrixError;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, MatrixError> {
        Self::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}
