//! Latin squares: validation, sign profiles, the `(i,j,k) -> (i,k,j)`
//! conjugate and exhaustive enumeration.
//!
//! Symbols are 1-based at the API boundary and 0-based in storage. The symbol
//! permutation of `s` maps a row index to the column holding `s` in that row.

mod counts;
mod search;

pub use counts::{
    at_from_lemma21, classified_counts, count_summary, lemma21_lhs, zappa_check, ClassifiedCounts,
    CountSummary,
};
pub use search::{enumerate, for_each_square, Filter, Limits, SquareIter, HARD_MAX_ORDER};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::perm::Permutation;

/// Largest order a [`LatinSquare`] value can hold.
pub const MAX_SQUARE_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("grid is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("order {0} is outside 1..={MAX_SQUARE_ORDER}")]
    InvalidOrder(usize),
    #[error("symbol {value} at row {row}, column {col} is outside 1..={n}")]
    SymbolOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        n: usize,
    },
    #[error("row {0} repeats a symbol")]
    DuplicateInRow(usize),
    #[error("column {0} repeats a symbol")]
    DuplicateInColumn(usize),
    #[error("order {n} exceeds the enumeration cap {cap}")]
    OrderAboveCap { n: usize, cap: usize },
    #[error("this computation is defined for odd orders only, got {0}")]
    EvenOrder(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u8>,
}

/// Row, column, symbol and total signs of a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityProfile {
    pub row_sign: i32,
    pub col_sign: i32,
    pub symbol_sign: i32,
    pub total_sign: i32,
}

impl LatinSquare {
    /// Validates a grid of 1-based symbols, reporting the first violation
    /// (range first, then rows top to bottom, then columns left to right).
    pub fn validate(grid: &[Vec<usize>]) -> Result<Self, LatinError> {
        let n = grid.len();
        if n == 0 || n > MAX_SQUARE_ORDER {
            return Err(LatinError::InvalidOrder(n));
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in grid.iter().enumerate() {
            if row.len() != n {
                return Err(LatinError::NotSquare {
                    row: i + 1,
                    len: row.len(),
                    n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v == 0 || v > n {
                    return Err(LatinError::SymbolOutOfRange {
                        row: i + 1,
                        col: j + 1,
                        value: v,
                        n,
                    });
                }
                cells.push((v - 1) as u8);
            }
        }
        for i in 0..n {
            let mut seen = 0u32;
            for j in 0..n {
                let bit = 1 << cells[i * n + j];
                if seen & bit != 0 {
                    return Err(LatinError::DuplicateInRow(i + 1));
                }
                seen |= bit;
            }
        }
        for j in 0..n {
            let mut seen = 0u32;
            for i in 0..n {
                let bit = 1 << cells[i * n + j];
                if seen & bit != 0 {
                    return Err(LatinError::DuplicateInColumn(j + 1));
                }
                seen |= bit;
            }
        }
        Ok(LatinSquare { n, cells })
    }

    /// Wraps 0-based cells already known to form a Latin square.
    pub(crate) fn from_cells_unchecked(n: usize, cells: &[u8]) -> Self {
        debug_assert_eq!(cells.len(), n * n);
        LatinSquare {
            n,
            cells: cells.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// 1-based symbol at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.n + j] as usize + 1
    }

    /// 0-based cells, row-major.
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// 1-based rows.
    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        self.cells
            .chunks(self.n)
            .map(|r| r.iter().map(|&v| v as usize + 1).collect())
            .collect()
    }

    /// Row `i` read as the permutation `j -> L[i][j]`.
    pub fn row(&self, i: usize) -> Permutation {
        Permutation::from_images(&self.cells[i * self.n..(i + 1) * self.n]).expect("latin row")
    }

    /// Column `j` read as the permutation `i -> L[i][j]`.
    pub fn column(&self, j: usize) -> Permutation {
        let col: Vec<u8> = (0..self.n).map(|i| self.cells[i * self.n + j]).collect();
        Permutation::from_images(&col).expect("latin column")
    }

    /// Permutation of the positions of 0-based symbol `s`: row `i` maps to the
    /// column where `L[i][j] = s`.
    pub fn symbol_permutation(&self, s: usize) -> Permutation {
        let mut images = vec![0u8; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if self.cells[i * self.n + j] as usize == s {
                    images[i] = j as u8;
                }
            }
        }
        Permutation::from_images(&images).expect("latin symbol positions")
    }

    pub fn symbol_permutations(&self) -> Vec<Permutation> {
        (0..self.n).map(|s| self.symbol_permutation(s)).collect()
    }

    pub fn parity_profile(&self) -> ParityProfile {
        let row_sign: i32 = (0..self.n).map(|i| self.row(i).sign()).product();
        let col_sign: i32 = (0..self.n).map(|j| self.column(j).sign()).product();
        let symbol_sign: i32 = (0..self.n)
            .map(|s| self.symbol_permutation(s).sign())
            .product();
        ParityProfile {
            row_sign,
            col_sign,
            symbol_sign,
            total_sign: row_sign * col_sign,
        }
    }

    /// Conjugate under `(row, column, symbol) -> (row, symbol, column)`.
    pub fn tau(&self) -> LatinSquare {
        let n = self.n;
        let mut cells = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = self.cells[i * n + j] as usize;
                cells[i * n + k] = j as u8;
            }
        }
        LatinSquare { n, cells }
    }

    pub fn transpose(&self) -> LatinSquare {
        let n = self.n;
        let cells = (0..n * n)
            .map(|c| self.cells[(c % n) * n + c / n])
            .collect();
        LatinSquare { n, cells }
    }

    pub fn swap_columns(&self, a: usize, b: usize) -> LatinSquare {
        let mut out = self.clone();
        for i in 0..self.n {
            out.cells.swap(i * self.n + a, i * self.n + b);
        }
        out
    }

    /// Replaces every symbol `s` by `sigma(s)`, which composes `sigma` onto
    /// every row and every column.
    pub fn relabel_symbols(&self, sigma: &Permutation) -> LatinSquare {
        let cells = self
            .cells
            .iter()
            .map(|&s| sigma.apply(s as usize) as u8)
            .collect();
        LatinSquare { n: self.n, cells }
    }

    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|k| self.cells[k] as usize == k && self.cells[k * self.n] as usize == k)
    }

    pub fn is_normalized_unipotent(&self) -> bool {
        (0..self.n).all(|k| self.cells[k] as usize == k)
            && (0..self.n).all(|i| self.cells[i * self.n + i] == self.cells[0])
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatinSquare{:?}", self.to_rows())
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Row-major array of 1-based symbols.
impl Serialize for LatinSquare {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LatinSquare {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<usize>>::deserialize(deserializer)?;
        LatinSquare::validate(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(rows: &[&[usize]]) -> LatinSquare {
        LatinSquare::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(LatinSquare::validate(&[vec![1, 2], vec![2, 1]]).is_ok());
        assert_eq!(
            LatinSquare::validate(&[vec![1, 1], vec![2, 2]]),
            Err(LatinError::DuplicateInRow(1))
        );
        assert_eq!(
            LatinSquare::validate(&[vec![1, 2], vec![1, 2]]),
            Err(LatinError::DuplicateInColumn(1))
        );
        assert!(matches!(
            LatinSquare::validate(&[vec![1, 3], vec![2, 1]]),
            Err(LatinError::SymbolOutOfRange {
                row: 1,
                col: 2,
                value: 3,
                n: 2
            })
        ));
        assert!(matches!(
            LatinSquare::validate(&[vec![1, 2], vec![2]]),
            Err(LatinError::NotSquare { row: 2, .. })
        ));
        assert_eq!(LatinSquare::validate(&[]), Err(LatinError::InvalidOrder(0)));
    }

    #[test]
    fn profile_examples() {
        let p = sq(&[&[1, 2], &[2, 1]]).parity_profile();
        assert_eq!((p.row_sign, p.col_sign, p.total_sign), (-1, -1, 1));

        let cyclic = sq(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]).parity_profile();
        assert_eq!(
            cyclic,
            ParityProfile {
                row_sign: 1,
                col_sign: 1,
                symbol_sign: -1,
                total_sign: 1
            }
        );

        let unipotent = sq(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        assert!(unipotent.is_normalized_unipotent());
        let p = unipotent.parity_profile();
        assert_eq!((p.row_sign, p.col_sign, p.total_sign), (1, -1, -1));
    }

    #[test]
    fn symbol_permutation_orientation() {
        let l = sq(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        // symbol 1 sits at columns 1, 2, 3 of rows 1, 2, 3
        assert!(l.symbol_permutation(0).is_identity());
        // symbol 3: row 1 -> col 3, row 2 -> col 1, row 3 -> col 2
        assert_eq!(l.symbol_permutation(2).one_line(), vec![3, 1, 2]);
    }

    #[test]
    fn tau_examples() {
        let two = sq(&[&[1, 2], &[2, 1]]);
        assert_eq!(two.tau(), two);
        let l = sq(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        let t = l.tau();
        assert_eq!(t.tau(), l);
        for s in 0..3 {
            assert_eq!(t.column(s), l.symbol_permutation(s));
        }
    }

    #[test]
    fn reduced_and_unipotent_flags() {
        let cyclic = sq(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]);
        assert!(cyclic.is_reduced());
        assert!(!cyclic.is_normalized_unipotent());
        assert!(!cyclic.transpose().swap_columns(0, 1).is_reduced());
    }

    #[test]
    fn json_rows() {
        let l = sq(&[&[1, 2], &[2, 1]]);
        assert_eq!(serde_json::to_string(&l).unwrap(), "[[1,2],[2,1]]");
        assert!(serde_json::from_str::<LatinSquare>("[[1,1],[2,2]]").is_err());
    }
}
