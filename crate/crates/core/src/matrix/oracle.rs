//! Textbook reference evaluations used to cross-check the fast kernels.
//!
//! Both are exponential and only meant for small dimensions.

use super::Entries;
use crate::perm::Permutation;

/// Sum over all `n!` diagonals.
pub fn naive_permanent<M: Entries + ?Sized>(m: &M) -> i128 {
    let n = m.dim();
    Permutation::all(n)
        .expect("dimension is a valid order")
        .map(|pi| {
            (0..n)
                .map(|i| m.entry(i, pi.apply(i)) as i128)
                .product::<i128>()
        })
        .sum()
}

/// Laplace expansion along the first row.
pub fn cofactor_determinant<M: Entries + ?Sized>(m: &M) -> i128 {
    let n = m.dim();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    expand(m, &rows, &cols)
}

fn expand<M: Entries + ?Sized>(m: &M, rows: &[usize], cols: &[usize]) -> i128 {
    match rows.len() {
        0 => 1,
        1 => m.entry(rows[0], cols[0]) as i128,
        _ => {
            let mut total = 0i128;
            for (k, &c) in cols.iter().enumerate() {
                let a = m.entry(rows[0], c) as i128;
                if a == 0 {
                    continue;
                }
                let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = expand(m, &rows[1..], &minor_cols);
                if k % 2 == 0 {
                    total += a * minor;
                } else {
                    total -= a * minor;
                }
            }
            total
        }
    }
}
