use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::kernels::{bareiss_i64, det_mod_rows};
use super::{Entries, MatrixError};
use crate::perm::Permutation;

pub const MAX_DIM: usize = 16;

/// Largest dimension whose code fits in a `u128`.
const MAX_CODE_DIM: usize = 11;

/// An `n x n` (0,1)-matrix stored as row bit-vectors: bit `j` of `rows[i]` is `A[i][j]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: u8,
    rows: [u16; MAX_DIM],
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Result<Self, MatrixError> {
        check_dim(n)?;
        Ok(BitMatrix {
            n: n as u8,
            rows: [0; MAX_DIM],
        })
    }

    pub fn ones(n: usize) -> Result<Self, MatrixError> {
        check_dim(n)?;
        let full = full_row(n);
        let mut rows = [0; MAX_DIM];
        rows[..n].fill(full);
        Ok(BitMatrix { n: n as u8, rows })
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        Ok(Self::permutation_matrix(
            &Permutation::identity(n).map_err(|_| MatrixError::DimensionOutOfRange(n, MAX_DIM))?,
        ))
    }

    /// The matrix with a 1 at `(i, pi(i))` for every `i`.
    pub fn permutation_matrix(pi: &Permutation) -> Self {
        let mut rows = [0u16; MAX_DIM];
        for (i, row) in rows.iter_mut().enumerate().take(pi.order()) {
            *row = 1 << pi.apply(i);
        }
        BitMatrix {
            n: pi.order() as u8,
            rows,
        }
    }

    /// Builds from row bit-vectors; bits at or above `n` must be clear.
    pub fn from_rows(rows: &[u16]) -> Result<Self, MatrixError> {
        let n = rows.len();
        check_dim(n)?;
        let mut out = [0u16; MAX_DIM];
        for (i, &r) in rows.iter().enumerate() {
            if r & !full_row(n) != 0 {
                let col = 15 - r.leading_zeros() as usize;
                return Err(MatrixError::EntryOutOfRange {
                    row: i,
                    col,
                    value: 1,
                });
            }
            out[i] = r;
        }
        Ok(BitMatrix {
            n: n as u8,
            rows: out,
        })
    }

    /// Builds from explicit 0/1 entries, row-major.
    pub fn from_entries(entries: &[Vec<u8>]) -> Result<Self, MatrixError> {
        let n = entries.len();
        check_dim(n)?;
        let mut rows = [0u16; MAX_DIM];
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => rows[i] |= 1 << j,
                    _ => {
                        return Err(MatrixError::EntryOutOfRange {
                            row: i,
                            col: j,
                            value: v as i64,
                        })
                    }
                }
            }
        }
        Ok(BitMatrix { n: n as u8, rows })
    }

    /// Parses the human form: one string of `0`/`1` characters per row, column 0 first.
    pub fn from_strings<S: AsRef<str>>(lines: &[S]) -> Result<Self, MatrixError> {
        let entries: Vec<Vec<u8>> = lines
            .iter()
            .map(|l| l.as_ref().bytes().map(|b| b.wrapping_sub(b'0')).collect())
            .collect();
        Self::from_entries(&entries)
    }

    /// Human form: one `0`/`1` string per row, column 0 first.
    pub fn to_strings(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`BitMatrix::to_code`]: bit `i * n + j` of `code` becomes `A[i][j]`.
    pub fn from_code(code: u128, n: usize) -> Result<Self, MatrixError> {
        check_dim(n)?;
        if n > MAX_CODE_DIM {
            return Err(MatrixError::CodeTooWide(n));
        }
        let bits = n * n;
        if bits < 128 && code >> bits != 0 {
            return Err(MatrixError::CodeOutOfRange { code, bits });
        }
        let mask = full_row(n) as u128;
        let mut rows = [0u16; MAX_DIM];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = ((code >> (i * n)) & mask) as u16;
        }
        Ok(BitMatrix { n: n as u8, rows })
    }

    /// Unchecked decoding for the summation drivers (`n <= 8`, code in range).
    #[inline]
    pub(crate) fn from_code_u64(code: u64, n: usize) -> Self {
        let mask = full_row(n) as u64;
        let mut rows = [0u16; MAX_DIM];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = ((code >> (i * n)) & mask) as u16;
        }
        BitMatrix { n: n as u8, rows }
    }

    /// The integer whose bit `i * n + j` is `A[i][j]`.
    pub fn to_code(&self) -> Result<u128, MatrixError> {
        let n = self.dim();
        if n > MAX_CODE_DIM {
            return Err(MatrixError::CodeTooWide(n));
        }
        Ok((0..n).fold(0u128, |acc, i| acc | (self.rows[i] as u128) << (i * n)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn rows(&self) -> &[u16] {
        &self.rows[..self.dim()]
    }

    #[inline]
    pub fn row(&self, i: usize) -> u16 {
        self.rows[i]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn popcount(&self) -> u32 {
        self.rows().iter().map(|r| r.count_ones()).sum()
    }

    /// Number of zero entries.
    pub fn sigma0(&self) -> u32 {
        (self.dim() * self.dim()) as u32 - self.popcount()
    }

    /// True if some row or some column is entirely zero, in which case both
    /// the permanent and the determinant vanish.
    #[inline]
    pub fn has_zero_line(&self) -> bool {
        let mut cols = 0u16;
        for &r in self.rows() {
            if r == 0 {
                return true;
            }
            cols |= r;
        }
        cols != full_row(self.dim())
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix {
            n: self.n,
            rows: [0; MAX_DIM],
        };
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.get(i, j) {
                    out.rows[j] |= 1 << i;
                }
            }
        }
        out
    }

    /// Moves row `i` to position `pi(i)`.
    pub fn permute_rows(&self, pi: &Permutation) -> BitMatrix {
        debug_assert_eq!(pi.order(), self.dim());
        let mut out = BitMatrix {
            n: self.n,
            rows: [0; MAX_DIM],
        };
        for i in 0..self.dim() {
            out.rows[pi.apply(i)] = self.rows[i];
        }
        out
    }

    /// Moves column `j` to position `pi(j)`.
    pub fn permute_cols(&self, pi: &Permutation) -> BitMatrix {
        debug_assert_eq!(pi.order(), self.dim());
        let mut out = BitMatrix {
            n: self.n,
            rows: [0; MAX_DIM],
        };
        for i in 0..self.dim() {
            let mut r = 0u16;
            for j in 0..self.dim() {
                if self.get(i, j) {
                    r |= 1 << pi.apply(j);
                }
            }
            out.rows[i] = r;
        }
        out
    }

    /// Permanent by Ryser's formula with Gray-code subset updates.
    pub fn permanent(&self) -> i128 {
        let n = self.dim();
        let mut cols = [0u16; MAX_DIM];
        for i in 0..n {
            for (j, col) in cols.iter_mut().enumerate().take(n) {
                if self.get(i, j) {
                    *col |= 1 << i;
                }
            }
        }
        let mut row_sums = [0i32; MAX_DIM];
        let mut total: i128 = 0;
        let mut gray: u32 = 0;
        for step in 1u32..(1u32 << n) {
            let j = step.trailing_zeros() as usize;
            gray ^= 1 << j;
            let delta = if gray & (1 << j) != 0 { 1 } else { -1 };
            let mut c = cols[j];
            while c != 0 {
                row_sums[c.trailing_zeros() as usize] += delta;
                c &= c - 1;
            }
            let mut prod: i128 = 1;
            for &s in &row_sums[..n] {
                if s == 0 {
                    prod = 0;
                    break;
                }
                prod *= s as i128;
            }
            if gray.count_ones() % 2 == 1 {
                total -= prod;
            } else {
                total += prod;
            }
        }
        if n % 2 == 1 {
            -total
        } else {
            total
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        let n = self.dim();
        let mut a = [[0i64; MAX_DIM]; MAX_DIM];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            for (j, v) in row.iter_mut().enumerate().take(n) {
                *v = self.get(i, j) as i64;
            }
        }
        bareiss_i64(&mut a, n) as i128
    }

    /// Determinant for `n <= 8`, the hot path of the summation drivers.
    #[inline]
    pub(crate) fn determinant_small(&self) -> i64 {
        let n = self.dim();
        debug_assert!(n <= 8);
        let mut a = [[0i64; 8]; 8];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            let r = self.rows[i];
            for (j, v) in row.iter_mut().enumerate().take(n) {
                *v = (r >> j & 1) as i64;
            }
        }
        bareiss_i64(&mut a, n)
    }

    /// Determinant reduced into `[0, p)`, computed over the field with `p` elements.
    pub fn det_mod(&self, p: u64) -> Result<u64, MatrixError> {
        let rows = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j) as u64).collect())
            .collect();
        det_mod_rows(rows, p)
    }

    /// Ordering key for canonical forms: the row read as a binary numeral with
    /// column 0 most significant, so `100` sorts above `010`.
    #[inline]
    pub fn row_key(&self, i: usize) -> u16 {
        self.rows[i].reverse_bits() >> (16 - self.dim())
    }

    /// Row-permutation canonical form: rows in non-increasing [`row_key`](Self::row_key) order.
    pub fn row_canonical(&self) -> BitMatrix {
        let n = self.dim();
        let mut out = *self;
        out.rows[..n].sort_unstable_by_key(|&r| std::cmp::Reverse(r.reverse_bits()));
        out
    }

    pub fn is_canonical(&self) -> bool {
        (1..self.dim()).all(|i| self.row_key(i - 1) >= self.row_key(i))
    }

    pub fn has_distinct_rows(&self) -> bool {
        let r = self.rows();
        (0..r.len()).all(|i| (i + 1..r.len()).all(|j| r[i] != r[j]))
    }
}

#[inline]
fn full_row(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

fn check_dim(n: usize) -> Result<(), MatrixError> {
    if n == 0 || n > MAX_DIM {
        Err(MatrixError::DimensionOutOfRange(n, MAX_DIM))
    } else {
        Ok(())
    }
}

impl Entries for BitMatrix {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn entry(&self, i: usize, j: usize) -> i64 {
        self.get(i, j) as i64
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix{:?}", self.to_strings())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.to_strings().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CodeForm {
    n: usize,
    code: CodeValue,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CodeValue {
    Number(u64),
    Text(String),
}

/// JSON form `{"n": n, "code": "<decimal>"}`; numeric codes are accepted on input.
impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let code = self.to_code().map_err(serde::ser::Error::custom)?;
        CodeForm {
            n: self.dim(),
            code: CodeValue::Text(code.to_string()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let form = CodeForm::deserialize(deserializer)?;
        let code = match form.code {
            CodeValue::Number(c) => c as u128,
            CodeValue::Text(s) => s.parse::<u128>().map_err(D::Error::custom)?,
        };
        BitMatrix::from_code(code, form.n).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(lines: &[&str]) -> BitMatrix {
        BitMatrix::from_strings(lines).unwrap()
    }

    fn triangle() -> BitMatrix {
        m(&["110", "101", "011"])
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(BitMatrix::identity(3).unwrap().permanent(), 1);
        assert_eq!(BitMatrix::ones(3).unwrap().permanent(), 6);
        assert_eq!(triangle().permanent(), 2);
        assert_eq!(BitMatrix::zeros(4).unwrap().permanent(), 0);
        assert_eq!(BitMatrix::ones(1).unwrap().permanent(), 1);
        assert_eq!(BitMatrix::ones(10).unwrap().permanent(), 3_628_800);
    }

    #[test]
    fn permanent_of_all_ones_16() {
        // 16! fits comfortably; exercises the widest row sums.
        assert_eq!(BitMatrix::ones(16).unwrap().permanent(), 20_922_789_888_000);
    }

    #[test]
    fn determinant_examples() {
        for n in 1..=6 {
            assert_eq!(BitMatrix::identity(n).unwrap().determinant(), 1);
        }
        assert_eq!(BitMatrix::ones(3).unwrap().determinant(), 0);
        assert_eq!(triangle().determinant(), -2);
        assert_eq!(triangle().determinant_small(), -2);
    }

    #[test]
    fn det_mod_examples() {
        assert_eq!(BitMatrix::identity(3).unwrap().det_mod(3), Ok(1));
        assert_eq!(BitMatrix::ones(3).unwrap().det_mod(3), Ok(0));
        assert_eq!(triangle().det_mod(3), Ok(1));
        assert_eq!(triangle().det_mod(4), Err(MatrixError::NotPrime(4)));
    }

    #[test]
    fn sigma0_examples() {
        assert_eq!(BitMatrix::ones(3).unwrap().sigma0(), 0);
        assert_eq!(BitMatrix::zeros(3).unwrap().sigma0(), 9);
        assert_eq!(triangle().sigma0(), 3);
    }

    #[test]
    fn code_examples() {
        assert_eq!(
            BitMatrix::from_code(0, 3).unwrap(),
            BitMatrix::zeros(3).unwrap()
        );
        assert_eq!(
            BitMatrix::from_code((1 << 9) - 1, 3).unwrap(),
            BitMatrix::ones(3).unwrap()
        );
        assert!(matches!(
            BitMatrix::from_code(1 << 9, 3),
            Err(MatrixError::CodeOutOfRange { bits: 9, .. })
        ));
        // bit i*n+j is A[i][j]
        let a = BitMatrix::from_code(1 << (3 + 2), 3).unwrap();
        assert!(a.get(1, 2));
        assert_eq!(a.popcount(), 1);
        assert_eq!(
            BitMatrix::ones(11).unwrap().to_code().unwrap(),
            u128::MAX >> 7
        );
        assert_eq!(
            BitMatrix::ones(12).unwrap().to_code(),
            Err(MatrixError::CodeTooWide(12))
        );
    }

    #[test]
    fn canonical_examples() {
        let id = BitMatrix::identity(3).unwrap();
        assert_eq!(id.row_canonical().to_strings(), vec!["100", "010", "001"]);
        let keys: Vec<u16> = (0..3).map(|i| id.row_canonical().row_key(i)).collect();
        assert_eq!(keys, vec![4, 2, 1]);
        assert!(id.is_canonical());
        let flipped = m(&["001", "010", "100"]);
        assert!(!flipped.is_canonical());
        assert_eq!(flipped.row_canonical(), id);
        // repeated rows sort non-increasing
        assert!(m(&["110", "110", "001"]).is_canonical());
    }

    #[test]
    fn canonical_form_is_class_invariant() {
        let a = m(&["011", "110", "010"]);
        let canon = a.row_canonical();
        for pi in Permutation::all(3).unwrap() {
            assert_eq!(a.permute_rows(&pi).row_canonical(), canon);
        }
    }

    #[test]
    fn distinct_row_canonical_count() {
        let count = (0u128..512)
            .map(|c| BitMatrix::from_code(c, 3).unwrap())
            .filter(|a| a.has_distinct_rows() && a.is_canonical())
            .count();
        assert_eq!(count, 56);
    }

    #[test]
    fn zero_lines() {
        assert!(m(&["110", "000", "011"]).has_zero_line());
        assert!(m(&["110", "100", "110"]).has_zero_line());
        assert!(!triangle().has_zero_line());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            BitMatrix::from_strings(&["10", "1"]),
            Err(MatrixError::RaggedRow { row: 1, .. })
        ));
        assert!(matches!(
            BitMatrix::from_strings(&["12", "01"]),
            Err(MatrixError::EntryOutOfRange { .. })
        ));
        assert!(BitMatrix::from_rows(&[0b100, 0b01]).is_err());
        assert_eq!(
            BitMatrix::zeros(17),
            Err(MatrixError::DimensionOutOfRange(17, 16))
        );
    }

    #[test]
    fn json_form() {
        let a = triangle();
        let code = a.to_code().unwrap();
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, format!("{{\"n\":3,\"code\":\"{code}\"}}"));
        assert_eq!(serde_json::from_str::<BitMatrix>(&text).unwrap(), a);
        let numeric = format!("{{\"n\":3,\"code\":{code}}}");
        assert_eq!(serde_json::from_str::<BitMatrix>(&numeric).unwrap(), a);
    }

    #[test]
    fn transpose_and_permutations() {
        let a = m(&["110", "001", "011"]);
        assert_eq!(a.transpose().transpose(), a);
        let nu = Permutation::cyclic(3, 1).unwrap();
        let moved = a.permute_rows(&nu);
        assert_eq!(moved.row(1), a.row(0));
        let moved = a.permute_cols(&nu);
        assert_eq!(moved.get(0, 1), a.get(0, 0));
        assert_eq!(
            BitMatrix::permutation_matrix(&nu).to_strings(),
            vec!["010", "001", "100"]
        );
    }
}
