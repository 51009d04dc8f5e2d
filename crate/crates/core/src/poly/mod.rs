//! Square-free (multilinear) polynomials in the `n^2` cell variables `X_ij`.
//!
//! A monomial is an `n^2`-bit mask with bit `i*n + j` standing for `X_ij`.
//! Multiplication drops every product whose masks overlap: only the
//! coefficient of the full monomial `prod X_ij` is ever read, and no term
//! containing a square can contribute to it.

mod tuple;

pub use tuple::{prop42_lhs, prop42_rhs, theorem41_coeff, theorem41_unfiltered};

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::perm::Permutation;

/// Largest order for which cell masks fit in a `u64`.
pub const MAX_POLY_ORDER: usize = 8;

/// Hard cap on the number of terms held by any intermediate product.
pub const MAX_TERMS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial order {0} is outside 1..={MAX_POLY_ORDER}")]
    InvalidOrder(usize),
    #[error("{what} is out of reach for n = {n}")]
    ResourceCap { what: &'static str, n: usize },
    #[error("polynomials over {0} and {1} variables cannot be multiplied")]
    OrderMismatch(usize, usize),
    #[error("this coefficient is defined for odd orders only, got {0}")]
    EvenOrder(usize),
    #[error("expected {expected} matrices of dimension {n}, got {got}")]
    BadTuple {
        expected: usize,
        n: usize,
        got: usize,
    },
    #[error("exact arithmetic overflowed 128 bits")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareFreePoly {
    n: usize,
    terms: BTreeMap<u64, i128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixPolyKind {
    Determinant,
    Permanent,
}

impl SquareFreePoly {
    pub fn zero(n: usize) -> Result<Self, PolyError> {
        check_order(n)?;
        Ok(SquareFreePoly {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(n: usize) -> Result<Self, PolyError> {
        let mut p = Self::zero(n)?;
        p.terms.insert(0, 1);
        Ok(p)
    }

    /// Builds from `(mask, coefficient)` pairs, summing repeats and dropping zeros.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (u64, i128)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(n)?;
        let limit = full_mask(n);
        for (mask, c) in terms {
            if mask & !limit != 0 {
                return Err(PolyError::InvalidOrder(n));
            }
            let slot = p.terms.entry(mask).or_insert(0);
            *slot = slot.checked_add(c).ok_or(PolyError::Overflow)?;
        }
        p.terms.retain(|_, c| *c != 0);
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<u64, i128> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u64) -> i128 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    /// Coefficient of the monomial containing every variable once.
    pub fn full_coefficient(&self) -> i128 {
        self.coefficient(full_mask(self.n))
    }
}

#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n * n == 64 {
        u64::MAX
    } else {
        (1u64 << (n * n)) - 1
    }
}

fn check_order(n: usize) -> Result<(), PolyError> {
    if n == 0 || n > MAX_POLY_ORDER {
        return Err(PolyError::InvalidOrder(n));
    }
    Ok(())
}

/// Mask of the diagonal `{(i, pi(i))}`.
#[inline]
pub fn permutation_mask(pi: &Permutation) -> u64 {
    let n = pi.order();
    (0..n).fold(0u64, |m, i| m | 1 << (i * n + pi.apply(i)))
}

/// `per(X)` or `det(X)` expanded over `Sym(n)`: one monomial per permutation.
pub fn matrix_poly(n: usize, kind: MatrixPolyKind) -> Result<SquareFreePoly, PolyError> {
    check_order(n)?;
    if n > 6 {
        return Err(PolyError::ResourceCap {
            what: "matrix polynomial expansion",
            n,
        });
    }
    let terms = Permutation::all(n)
        .map_err(|_| PolyError::InvalidOrder(n))?
        .map(|pi| {
            let c = match kind {
                MatrixPolyKind::Permanent => 1,
                MatrixPolyKind::Determinant => pi.sign() as i128,
            };
            (permutation_mask(&pi), c)
        });
    SquareFreePoly::from_terms(n, terms)
}

/// Product keeping only terms with disjoint masks.
pub fn sf_multiply(p: &SquareFreePoly, q: &SquareFreePoly) -> Result<SquareFreePoly, PolyError> {
    if p.n != q.n {
        return Err(PolyError::OrderMismatch(p.n, q.n));
    }
    let mut acc: HashMap<u64, i128> = HashMap::new();
    for (&m1, &c1) in &p.terms {
        for (&m2, &c2) in &q.terms {
            if m1 & m2 != 0 {
                continue;
            }
            let c = c1.checked_mul(c2).ok_or(PolyError::Overflow)?;
            let slot = acc.entry(m1 | m2).or_insert(0);
            *slot = slot.checked_add(c).ok_or(PolyError::Overflow)?;
        }
        if acc.len() > MAX_TERMS {
            return Err(PolyError::ResourceCap {
                what: "square-free product",
                n: p.n,
            });
        }
    }
    let terms = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    Ok(SquareFreePoly { n: p.n, terms })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    /// `per(X)^n`: the full coefficient is `L_n`.
    PerN,
    /// `det(X)^n`: `(-1)^(n(n-1)/2) (L^EVEN - L^ODD)`.
    DetN,
    /// `per(X) det(X)^(n-1)`, odd `n`: `(-1)^(n(n-1)/2) n! (n-1)! AT(n)`.
    PerDet,
}

impl CoeffMode {
    pub fn name(self) -> &'static str {
        match self {
            CoeffMode::PerN => "per_n",
            CoeffMode::DetN => "det_n",
            CoeffMode::PerDet => "per_det",
        }
    }
}

/// Largest order accepted by [`coeff_pipeline`].
pub const MAX_PIPELINE_ORDER: usize = 5;

/// Full-monomial coefficient of the `n`-fold product, plus the largest
/// intermediate term count seen.
pub fn coeff_pipeline_with_stats(n: usize, mode: CoeffMode) -> Result<(i128, usize), PolyError> {
    check_order(n)?;
    if n > MAX_PIPELINE_ORDER {
        return Err(PolyError::ResourceCap {
            what: "coefficient pipeline",
            n,
        });
    }
    if mode == CoeffMode::PerDet && n.is_multiple_of(2) {
        return Err(PolyError::EvenOrder(n));
    }
    let per = matrix_poly(n, MatrixPolyKind::Permanent)?;
    let det = matrix_poly(n, MatrixPolyKind::Determinant)?;
    let factors: Vec<&SquareFreePoly> = match mode {
        CoeffMode::PerN => vec![&per; n],
        CoeffMode::DetN => vec![&det; n],
        CoeffMode::PerDet => std::iter::once(&per)
            .chain(std::iter::repeat_n(&det, n - 1))
            .collect(),
    };
    let mut acc = SquareFreePoly::one(n)?;
    let mut peak = 1;
    for f in factors {
        acc = sf_multiply(&acc, f)?;
        peak = peak.max(acc.len());
    }
    Ok((acc.full_coefficient(), peak))
}

pub fn coeff_pipeline(n: usize, mode: CoeffMode) -> Result<i128, PolyError> {
    coeff_pipeline_with_stats(n, mode).map(|(c, _)| c)
}

#[derive(Serialize, Deserialize)]
struct PolyForm {
    n: usize,
    terms: Vec<(u64, String)>,
}

/// `{"n": n, "terms": [[mask, "coeff"], ...]}` sorted by mask.
impl Serialize for SquareFreePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolyForm {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(&m, c)| (m, c.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SquareFreePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let form = PolyForm::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(form.terms.len());
        for (m, c) in form.terms {
            terms.push((m, c.parse::<i128>().map_err(D::Error::custom)?));
        }
        SquareFreePoly::from_terms(form.n, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(n: usize) -> SquareFreePoly {
        matrix_poly(n, MatrixPolyKind::Determinant).unwrap()
    }

    fn per(n: usize) -> SquareFreePoly {
        matrix_poly(n, MatrixPolyKind::Permanent).unwrap()
    }

    #[test]
    fn matrix_poly_examples() {
        let d2 = det(2);
        // X11 X22 is bits 0 and 3; X12 X21 is bits 1 and 2
        assert_eq!(
            d2.terms().iter().map(|(&m, &c)| (m, c)).collect::<Vec<_>>(),
            vec![(0b0110, -1), (0b1001, 1)]
        );
        let p3 = per(3);
        assert_eq!(p3.len(), 6);
        assert!(p3.terms().values().all(|&c| c == 1));
        let d3 = det(3);
        assert_eq!(d3.terms().values().filter(|&&c| c == 1).count(), 3);
        assert_eq!(d3.terms().values().sum::<i128>(), 0);
    }

    #[test]
    fn multiply_examples() {
        let sq = sf_multiply(&det(2), &det(2)).unwrap();
        assert_eq!(
            sq.terms().iter().map(|(&m, &c)| (m, c)).collect::<Vec<_>>(),
            vec![(0b1111, -2)]
        );
        assert_eq!(
            sf_multiply(&det(3), &SquareFreePoly::one(3).unwrap()).unwrap(),
            det(3)
        );
        assert_eq!(sf_multiply(&per(2), &per(2)).unwrap().full_coefficient(), 2);
        assert_eq!(
            sf_multiply(&det(2), &det(3)),
            Err(PolyError::OrderMismatch(2, 3))
        );
    }

    #[test]
    fn full_coefficient_examples() {
        assert_eq!(sf_multiply(&per(2), &per(2)).unwrap().full_coefficient(), 2);
        assert_eq!(
            sf_multiply(&det(2), &det(2)).unwrap().full_coefficient(),
            -2
        );
        assert_eq!(SquareFreePoly::zero(3).unwrap().full_coefficient(), 0);
    }

    #[test]
    fn pipeline_n3() {
        assert_eq!(coeff_pipeline(3, CoeffMode::PerN), Ok(12));
        assert_eq!(coeff_pipeline(3, CoeffMode::DetN), Ok(0));
        assert_eq!(coeff_pipeline(3, CoeffMode::PerDet), Ok(12));
        assert_eq!(
            coeff_pipeline(4, CoeffMode::PerDet),
            Err(PolyError::EvenOrder(4))
        );
        assert!(matches!(
            coeff_pipeline(6, CoeffMode::PerN),
            Err(PolyError::ResourceCap { .. })
        ));
    }

    #[test]
    fn pipeline_small_orders() {
        assert_eq!(coeff_pipeline(1, CoeffMode::PerN), Ok(1));
        assert_eq!(coeff_pipeline(2, CoeffMode::PerN), Ok(2));
        assert_eq!(coeff_pipeline(2, CoeffMode::DetN), Ok(-2));
        assert_eq!(coeff_pipeline(4, CoeffMode::PerN), Ok(576));
    }

    #[test]
    fn product_order_does_not_matter() {
        let a = sf_multiply(&sf_multiply(&per(3), &det(3)).unwrap(), &det(3)).unwrap();
        let b = sf_multiply(&sf_multiply(&det(3), &det(3)).unwrap(), &per(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_form() {
        let d2 = det(2);
        let text = serde_json::to_string(&d2).unwrap();
        assert_eq!(text, r#"{"n":2,"terms":[[6,"-1"],[9,"1"]]}"#);
        assert_eq!(serde_json::from_str::<SquareFreePoly>(&text).unwrap(), d2);
        assert!(serde_json::from_str::<SquareFreePoly>(r#"{"n":2,"terms":[[16,"1"]]}"#).is_err());
    }
}
