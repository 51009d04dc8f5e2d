//! Sums over pairs of permutation tuples `(rho, sigma) in Sym(n)^n x Sym(n)^n`
//! with `rho_1 = id`, weighted by `sign(sigma_1) sign(sigma) sign(rho)` where
//! `sign(sigma)` is the product of the signs of its components. The term for
//! a pair touches the cells `(sigma_i(j), rho_j(i))` for all `i, j`.

use super::PolyError;
use crate::matrix::IntMatrix;
use crate::perm::{factorial, Permutation};

/// Largest order [`theorem41_coeff`] accepts: the pair count is `(n!)^(2n-1)`.
pub const MAX_TUPLE_ORDER: usize = 3;

fn check_tuple_order(n: usize) -> Result<(), PolyError> {
    if n.is_multiple_of(2) {
        return Err(PolyError::EvenOrder(n));
    }
    if n > MAX_TUPLE_ORDER {
        return Err(PolyError::ResourceCap {
            what: "permutation tuple sum",
            n,
        });
    }
    Ok(())
}

/// Odometer over `Sym(n)^len` as index tuples into `perms`.
struct Tuples {
    base: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Tuples {
    fn new(base: usize, len: usize) -> Self {
        Tuples {
            base,
            idx: vec![0; len],
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        for slot in self.idx.iter_mut().rev() {
            *slot += 1;
            if *slot < self.base {
                return true;
            }
            *slot = 0;
        }
        self.done = true;
        false
    }
}

/// `sign(sigma_1) * prod_i sign(sigma_i)`.
fn sigma_weight(perms: &[Permutation], sigma: &[usize]) -> i128 {
    let first = perms[sigma[0]].sign() as i128;
    first
        * sigma
            .iter()
            .map(|&s| perms[s].sign() as i128)
            .product::<i128>()
}

/// Coefficient `C` of the full monomial in the tuple sum with every `A_j = X`.
/// Pairs whose cell multiset repeats a cell are discarded as soon as the
/// repeat appears. `(-1)^(n(n-1)/2) C / (n! (n-1)!^2) = AT(n) (R^E - R^O)`.
pub fn theorem41_coeff(n: usize) -> Result<i128, PolyError> {
    check_tuple_order(n)?;
    let perms: Vec<Permutation> = Permutation::all(n)
        .map_err(|_| PolyError::InvalidOrder(n))?
        .collect();
    let mut total = 0i128;
    let mut sigma = Tuples::new(perms.len(), n);
    while !sigma.done {
        let weight = sigma_weight(&perms, &sigma.idx);
        // column j = 0 uses rho_1 = id: cells (sigma_i(0), i)
        let mut mask = 0u64;
        for i in 0..n {
            mask |= 1 << (perms[sigma.idx[i]].apply(0) * n + i);
        }
        total += weight * extend_columns(&perms, &sigma.idx, n, 1, mask);
        sigma.advance();
    }
    Ok(total)
}

/// Signed count of the ways to choose `rho_j .. rho_{n-1}` keeping cells disjoint.
fn extend_columns(perms: &[Permutation], sigma: &[usize], n: usize, j: usize, mask: u64) -> i128 {
    if j == n {
        return 1;
    }
    let mut total = 0i128;
    'rho: for rho in perms {
        let mut m = mask;
        for i in 0..n {
            let bit = 1u64 << (perms[sigma[i]].apply(j) * n + rho.apply(i));
            if m & bit != 0 {
                continue 'rho;
            }
            m |= bit;
        }
        total += rho.sign() as i128 * extend_columns(perms, sigma, n, j + 1, m);
    }
    total
}

/// The same signed sum with the disjointness filter removed (every pair
/// counted). Serves as a negative control for [`theorem41_coeff`].
pub fn theorem41_unfiltered(n: usize) -> Result<i128, PolyError> {
    check_tuple_order(n)?;
    let perms: Vec<Permutation> = Permutation::all(n)
        .map_err(|_| PolyError::InvalidOrder(n))?
        .collect();
    let mut total = 0i128;
    let mut sigma = Tuples::new(perms.len(), n);
    while !sigma.done {
        let weight = sigma_weight(&perms, &sigma.idx);
        let mut rho = Tuples::new(perms.len(), n - 1);
        while !rho.done {
            let s: i128 = rho.idx.iter().map(|&r| perms[r].sign() as i128).product();
            total += weight * s;
            rho.advance();
        }
        sigma.advance();
    }
    Ok(total)
}

fn check_tuple(matrices: &[IntMatrix]) -> Result<usize, PolyError> {
    let n = matrices.len();
    if n == 0 {
        return Err(PolyError::BadTuple {
            expected: 1,
            n: 0,
            got: 0,
        });
    }
    check_tuple_order(n)?;
    if let Some(bad) = matrices.iter().find(|m| m.dim() != n) {
        return Err(PolyError::BadTuple {
            expected: n,
            n: bad.dim(),
            got: n,
        });
    }
    Ok(n)
}

/// Left-hand side: `sum over (rho, sigma), rho_1 = id, of
/// sign(sigma_1) sign(sigma) sign(rho) prod_{i,j} (A_j)[sigma_i(j)][rho_j(i)]`,
/// evaluated term by term.
pub fn prop42_lhs(matrices: &[IntMatrix]) -> Result<i128, PolyError> {
    let n = check_tuple(matrices)?;
    let perms: Vec<Permutation> = Permutation::all(n)
        .map_err(|_| PolyError::InvalidOrder(n))?
        .collect();
    let id = perms
        .iter()
        .position(|p| p.is_identity())
        .expect("identity present");
    let mut total = 0i128;
    let mut sigma = Tuples::new(perms.len(), n);
    while !sigma.done {
        let weight = sigma_weight(&perms, &sigma.idx);
        let mut rho_rest = Tuples::new(perms.len(), n - 1);
        while !rho_rest.done {
            let rho = |j: usize| &perms[if j == 0 { id } else { rho_rest.idx[j - 1] }];
            let mut term = weight;
            for j in 0..n {
                term *= rho(j).sign() as i128;
            }
            'cells: for i in 0..n {
                for j in 0..n {
                    let a = matrices[j].get(perms[sigma.idx[i]].apply(j), rho(j).apply(i)) as i128;
                    term = term.checked_mul(a).ok_or(PolyError::Overflow)?;
                    if term == 0 {
                        break 'cells;
                    }
                }
            }
            total = total.checked_add(term).ok_or(PolyError::Overflow)?;
            rho_rest.advance();
        }
        sigma.advance();
    }
    Ok(total)
}

/// Right-hand side: `(n-1)! (R^E - R^O) per(A_1) prod_{j>=2} det(A_j)`.
pub fn prop42_rhs(matrices: &[IntMatrix], reduced_even_minus_odd: i128) -> Result<i128, PolyError> {
    let n = check_tuple(matrices)?;
    let mut value = factorial(n - 1)
        .checked_mul(reduced_even_minus_odd)
        .ok_or(PolyError::Overflow)?;
    value = value
        .checked_mul(matrices[0].permanent().map_err(|_| PolyError::Overflow)?)
        .ok_or(PolyError::Overflow)?;
    for m in &matrices[1..] {
        value = value
            .checked_mul(m.determinant().map_err(|_| PolyError::Overflow)?)
            .ok_or(PolyError::Overflow)?;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem41_values() {
        assert_eq!(theorem41_coeff(1), Ok(1));
        assert_eq!(theorem41_coeff(3), Ok(24));
        assert_eq!(theorem41_coeff(2), Err(PolyError::EvenOrder(2)));
        assert!(matches!(
            theorem41_coeff(5),
            Err(PolyError::ResourceCap { .. })
        ));
    }

    #[test]
    fn unfiltered_control_differs() {
        let unfiltered = theorem41_unfiltered(3).unwrap();
        assert_eq!(unfiltered, 0);
        assert_ne!(unfiltered, theorem41_coeff(3).unwrap());
    }

    #[test]
    fn prop42_fixed_inputs() {
        let id = vec![IntMatrix::identity(3).unwrap(); 3];
        assert_eq!(prop42_lhs(&id), Ok(2));
        assert_eq!(prop42_rhs(&id, 1), Ok(2));
        let ones = vec![IntMatrix::filled(3, 1).unwrap(); 3];
        assert_eq!(prop42_lhs(&ones), Ok(0));
        assert_eq!(prop42_rhs(&ones, 1), Ok(0));
    }

    #[test]
    fn prop42_order_one() {
        let a = vec![IntMatrix::from_rows(&[vec![-7]]).unwrap()];
        assert_eq!(prop42_lhs(&a), Ok(-7));
        assert_eq!(prop42_rhs(&a, 1), Ok(-7));
    }

    #[test]
    fn prop42_rejects_bad_tuples() {
        let two = vec![IntMatrix::identity(2).unwrap(); 2];
        assert_eq!(prop42_lhs(&two), Err(PolyError::EvenOrder(2)));
        let mixed = vec![
            IntMatrix::identity(3).unwrap(),
            IntMatrix::identity(2).unwrap(),
            IntMatrix::identity(3).unwrap(),
        ];
        assert!(matches!(
            prop42_lhs(&mixed),
            Err(PolyError::BadTuple { .. })
        ));
    }
}
