mod common;

use latin_parity::perm::Permutation;
use latin_parity::poly::{full_mask, matrix_poly, sf_multiply, MatrixPolyKind, SquareFreePoly};
use proptest::prelude::*;

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn pair(max: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n)))
}

proptest! {
    #[test]
    fn sign_is_multiplicative((p, q) in pair(16)) {
        let pq = p.compose(&q).unwrap();
        prop_assert_eq!(pq.sign(), p.sign() * q.sign());
        prop_assert_eq!(p.inverse().sign(), p.sign());
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        for i in 0..p.order() {
            prop_assert_eq!(pq.apply(i), p.apply(q.apply(i)));
        }
    }

    #[test]
    fn sign_matches_oracle(p in (1usize..=10).prop_flat_map(perm_strategy)) {
        let v: Vec<usize> = p.images().iter().map(|&x| x as usize).collect();
        prop_assert_eq!(p.sign() as i64, common::sign(&v));
        prop_assert_eq!(p.sign(), p.sign_by_cycles());
    }

    #[test]
    fn odd_cycles_are_even(half in 0usize..8, k in -40i64..40) {
        let n = 2 * half + 1;
        prop_assert_eq!(Permutation::cyclic(n, k).unwrap().sign(), 1);
    }

    #[test]
    fn sf_multiply_is_associative(
        a in prop::collection::vec((0u64..512, -5i128..=5), 0..12),
        b in prop::collection::vec((0u64..512, -5i128..=5), 0..12),
        c in prop::collection::vec((0u64..512, -5i128..=5), 0..12),
    ) {
        let p = SquareFreePoly::from_terms(3, a).unwrap();
        let q = SquareFreePoly::from_terms(3, b).unwrap();
        let r = SquareFreePoly::from_terms(3, c).unwrap();
        let left = sf_multiply(&sf_multiply(&p, &q).unwrap(), &r).unwrap();
        let right = sf_multiply(&p, &sf_multiply(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(sf_multiply(&p, &q).unwrap(), sf_multiply(&q, &p).unwrap());
    }
}

#[test]
fn inversion_sign_equals_cycle_sign_up_to_six() {
    for n in 1..=6 {
        let mut count = 0;
        for p in Permutation::all(n).unwrap() {
            assert_eq!(p.sign(), p.sign_by_cycles());
            count += 1;
        }
        assert_eq!(count as i128, common::factorial(n));
    }
}

#[test]
fn rank_unrank_round_trip() {
    for n in 1..=6 {
        for (i, p) in Permutation::all(n).unwrap().enumerate() {
            assert_eq!(p.lex_rank(), i as u64);
        }
    }
}

/// Full coefficient of `per(X)^a det(X)^b` by repeated square-free products,
/// compared with the enumeration oracle.
#[test]
fn poly_products_match_latin_oracle() {
    for n in 1..=4 {
        let per = matrix_poly(n, MatrixPolyKind::Permanent).unwrap();
        let det = matrix_poly(n, MatrixPolyKind::Determinant).unwrap();
        let power =
            |f: &SquareFreePoly| (1..n).fold(f.clone(), |acc, _| sf_multiply(&acc, f).unwrap());
        let (total, eo, _, _, _) = common::latin_counts(n);
        assert_eq!(power(&per).coefficient(full_mask(n)), total as i128);
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        assert_eq!(sign * power(&det).coefficient(full_mask(n)), eo as i128);
    }
}
