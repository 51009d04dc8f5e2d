use super::{Entries, MatrixError};

/// Ryser's formula with Gray-code subset updates, exact and overflow-checked.
///
/// `per(A) = (-1)^n * sum over column subsets S of (-1)^|S| * prod_i sum_{j in S} a_ij`.
pub(crate) fn ryser_checked<M: Entries + ?Sized>(m: &M) -> Result<i128, MatrixError> {
    let n = m.dim();
    let mut row_sums = vec![0i128; n];
    let mut total: i128 = 0;
    let mut gray: u32 = 0;
    for step in 1u32..(1u32 << n) {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        let adding = gray & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            let a = m.entry(i, col) as i128;
            *sum = if adding {
                sum.checked_add(a)
            } else {
                sum.checked_sub(a)
            }
            .ok_or(MatrixError::Overflow)?;
        }
        let mut prod: i128 = 1;
        for &s in &row_sums {
            prod = prod.checked_mul(s).ok_or(MatrixError::Overflow)?;
            if prod == 0 {
                break;
            }
        }
        let subset_odd = gray.count_ones() % 2 == 1;
        total = if subset_odd {
            total.checked_sub(prod)
        } else {
            total.checked_add(prod)
        }
        .ok_or(MatrixError::Overflow)?;
    }
    Ok(if n % 2 == 1 { -total } else { total })
}

/// Fraction-free (Bareiss) elimination over `i128` with overflow checks.
pub(crate) fn bareiss_checked<M: Entries + ?Sized>(m: &M) -> Result<i128, MatrixError> {
    let n = m.dim();
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m.entry(i, j) as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k]).ok_or(MatrixError::Overflow)?;
                let rhs = a[i][k].checked_mul(a[k][j]).ok_or(MatrixError::Overflow)?;
                let num = lhs.checked_sub(rhs).ok_or(MatrixError::Overflow)?;
                debug_assert_eq!(num % prev, 0);
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Bareiss elimination on a small dense `i64` matrix held in place.
///
/// Callers guarantee the minors fit in `i64` (true for every (0,1)-matrix up to
/// dimension 16).
pub fn bareiss_i64<const N: usize>(a: &mut [[i64; N]; N], n: usize) -> i64 {
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let lead = a[i][k];
            for j in k + 1..n {
                a[i][j] = (a[i][j] * pivot - lead * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = pivot;
    }
    sign * a[n - 1][n - 1]
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Determinant over the field with `p` elements; rows are given as residues.
pub fn det_mod_rows(mut a: Vec<Vec<u64>>, p: u64) -> Result<u64, MatrixError> {
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(MatrixError::NotPrime(p));
    }
    let n = a.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !a[r][k].is_multiple_of(p)) else {
            return Ok(0);
        };
        if r != k {
            a.swap(k, r);
            det = (p - det) % p;
        }
        let pivot = a[k][k] % p;
        det = det * pivot % p;
        let inv = pow_mod(pivot, p - 2, p);
        for i in k + 1..n {
            let factor = a[i][k] % p * inv % p;
            if factor == 0 {
                continue;
            }
            for j in k..n {
                let sub = factor * (a[k][j] % p) % p;
                a[i][j] = (a[i][j] % p + p - sub) % p;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn det_mod_rejects_composites() {
        assert_eq!(
            det_mod_rows(vec![vec![1]], 9),
            Err(MatrixError::NotPrime(9))
        );
        assert_eq!(
            det_mod_rows(vec![vec![1]], 1),
            Err(MatrixError::NotPrime(1))
        );
    }

    #[test]
    fn det_mod_small() {
        // [[2,1],[1,1]] has determinant 1
        assert_eq!(det_mod_rows(vec![vec![2, 1], vec![1, 1]], 5), Ok(1));
        // [[0,1],[1,0]] has determinant -1
        assert_eq!(det_mod_rows(vec![vec![0, 1], vec![1, 0]], 7), Ok(6));
    }
}
