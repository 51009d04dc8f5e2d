mod common;

use common::{code_rows, cofactor_det, naive_per, perms, sign};
use latin_parity::matrix::{BitMatrix, IntMatrix};
use latin_parity::perm::Permutation;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bit(code: u64, n: usize) -> BitMatrix {
    BitMatrix::from_code(code as u128, n).unwrap()
}

#[test]
fn ryser_and_bareiss_exhaustive_3x3() {
    for code in 0u64..512 {
        let m = bit(code, 3);
        let rows = code_rows(code, 3);
        assert_eq!(m.permanent(), naive_per(&rows), "per {code}");
        assert_eq!(m.determinant(), cofactor_det(&rows), "det {code}");
        let im = IntMatrix::from(&m);
        assert_eq!(im.permanent().unwrap(), naive_per(&rows));
        assert_eq!(im.determinant().unwrap(), cofactor_det(&rows));
    }
}

#[test]
fn ryser_and_bareiss_random_4x4_5x5() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4usize, 5] {
        for _ in 0..10_000 {
            let code = rng.random_range(0..1u64 << (n * n));
            let m = bit(code, n);
            let rows = code_rows(code, n);
            assert_eq!(m.permanent(), naive_per(&rows), "per n={n} code={code}");
            assert_eq!(
                m.determinant(),
                cofactor_det(&rows),
                "det n={n} code={code}"
            );
        }
    }
}

#[test]
fn int_kernels_random_signed() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=5usize {
        for _ in 0..500 {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect())
                .collect();
            let m = IntMatrix::from_rows(&rows).unwrap();
            assert_eq!(m.permanent().unwrap(), naive_per(&rows));
            assert_eq!(m.determinant().unwrap(), cofactor_det(&rows));
        }
    }
}

#[test]
fn det_mod_exhaustive_3x3() {
    for p in [3u64, 5, 7] {
        for code in 0u64..512 {
            let m = bit(code, 3);
            let want = cofactor_det(&code_rows(code, 3)).rem_euclid(p as i128) as u64;
            assert_eq!(m.det_mod(p).unwrap(), want, "p={p} code={code}");
        }
    }
}

#[test]
fn permutation_invariance_exhaustive_3x3() {
    let sym: Vec<Permutation> = Permutation::all(3).unwrap().collect();
    for code in 0u64..512 {
        let m = bit(code, 3);
        let (per, det) = (m.permanent(), m.determinant());
        for p in &sym {
            let pm = m.permute_rows(p);
            assert_eq!(pm.determinant(), p.sign() as i128 * det);
            assert_eq!(pm.determinant().pow(2), det.pow(2));
            for q in &sym {
                assert_eq!(pm.permute_cols(q).permanent(), per);
            }
        }
    }
}

#[test]
fn zero_one_determinants_are_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20_000 {
        let m = bit(rng.random_range(0..1u64 << 25), 5);
        assert!(m.determinant().abs() <= 5);
    }
    assert!((0u64..1 << 16).all(|c| bit(c, 4).determinant().abs() <= 3));
}

#[test]
fn canonical_rows_with_distinct_rows_3x3() {
    let canonical = (0u64..512)
        .map(|c| bit(c, 3))
        .filter(|m| m.is_canonical() && m.has_distinct_rows())
        .count();
    assert_eq!(canonical, 56);
}

#[test]
fn oracle_self_check() {
    assert_eq!(perms(4).len(), 24);
    assert_eq!(perms(4).iter().map(|p| sign(p)).sum::<i64>(), 0);
    assert_eq!(naive_per(&[vec![1, 1], vec![1, 1]]), 2);
    assert_eq!(cofactor_det(&[vec![1, 2], vec![3, 4]]), -2);
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

proptest! {
    #[test]
    fn code_round_trip(n in 1usize..=11, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = n * n;
        let code: u128 = if bits == 128 { rng.random() } else { rng.random::<u128>() & ((1u128 << bits) - 1) };
        let m = BitMatrix::from_code(code, n).unwrap();
        prop_assert_eq!(m.to_code().unwrap(), code);
        let s = m.to_strings();
        prop_assert_eq!(BitMatrix::from_strings(&s).unwrap(), m);
    }

    #[test]
    fn row_canonical_is_class_invariant(code in 0u64..1 << 16, p in perm_strategy(4)) {
        let m = bit(code, 4);
        prop_assert_eq!(m.permute_rows(&p).row_canonical(), m.row_canonical());
        prop_assert!(m.row_canonical().is_canonical() || !m.has_distinct_rows());
    }

    #[test]
    fn transpose_preserves_kernels(code in 0u64..1 << 25) {
        let m = bit(code, 5);
        prop_assert_eq!(m.transpose().permanent(), m.permanent());
        prop_assert_eq!(m.transpose().determinant(), m.determinant());
        prop_assert_eq!(m.transpose().transpose(), m);
    }
}
