use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use super::search::{fold_leaves, Filter, Leaf, Limits};
use super::LatinError;
use crate::perm::{factorial, triangular_sign, Permutation};
use crate::report::{Provenance, VerificationReport};

/// Every enumeration-side count for one order, from a single pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountSummary {
    pub n: usize,
    pub total: u64,
    pub even: u64,
    pub odd: u64,
    pub even_minus_odd: i64,
    pub unipotent_even: u64,
    pub unipotent_odd: u64,
    /// `unipotent_even - unipotent_odd`.
    pub at: i64,
    pub reduced_even: u64,
    pub reduced_odd: u64,
    pub reduced_even_minus_odd: i64,
    /// Reduced squares split by (row sign, column sign).
    pub reduced_pp: u64,
    pub reduced_pm: u64,
    pub reduced_mp: u64,
    pub reduced_mm: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    total: u64,
    even: u64,
    unipotent: [u64; 2],
    reduced: [[u64; 2]; 2],
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.total += o.total;
        self.even += o.even;
        for k in 0..2 {
            self.unipotent[k] += o.unipotent[k];
            for l in 0..2 {
                self.reduced[k][l] += o.reduced[k][l];
            }
        }
        self
    }
}

fn visit(n: usize, t: &mut Tally, leaf: &Leaf<'_>) {
    let c = leaf.cells;
    let total_parity = (leaf.row_parity ^ leaf.col_parity) as usize;
    t.total += 1;
    if total_parity == 0 {
        t.even += 1;
    }
    if !(0..n).all(|k| c[k] as usize == k) {
        return;
    }
    if (1..n).all(|i| c[i * n + i] == 0) {
        t.unipotent[total_parity] += 1;
    }
    if (1..n).all(|i| c[i * n] as usize == i) {
        t.reduced[leaf.row_parity as usize][leaf.col_parity as usize] += 1;
    }
}

/// Enumerates all squares of order `n` once and fills every count. Runs on
/// the current rayon pool.
pub fn count_summary(n: usize, limits: Limits) -> Result<CountSummary, LatinError> {
    limits.check(n)?;
    let started = Instant::now();
    let t = fold_leaves(
        n,
        Filter::All,
        Tally::default,
        |t, leaf| visit(n, t, leaf),
        Tally::add,
    );
    let odd = t.total - t.even;
    let [ue, uo] = t.unipotent;
    let [[pp, pm], [mp, mm]] = t.reduced;
    let reduced_even = pp + mm;
    let reduced_odd = pm + mp;
    Ok(CountSummary {
        n,
        total: t.total,
        even: t.even,
        odd,
        even_minus_odd: t.even as i64 - odd as i64,
        unipotent_even: ue,
        unipotent_odd: uo,
        at: ue as i64 - uo as i64,
        reduced_even,
        reduced_odd,
        reduced_even_minus_odd: reduced_even as i64 - reduced_odd as i64,
        reduced_pp: pp,
        reduced_pm: pm,
        reduced_mp: mp,
        reduced_mm: mm,
        elapsed: started.elapsed(),
    })
}

/// Squares tallied by the position permutation of symbol 1 and by symbol sign.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassifiedCounts {
    /// Keyed by the lexicographic rank of the permutation.
    pub by_permutation: BTreeMap<u64, (Permutation, u64, u64)>,
}

impl ClassifiedCounts {
    /// `(symbol-even, symbol-odd)` totals over all permutations.
    pub fn totals(&self) -> (u64, u64) {
        self.by_permutation
            .values()
            .fold((0, 0), |(e, o), &(_, se, so)| (e + se, o + so))
    }

    /// `sum over pi of sign(pi) * (even(pi) - odd(pi))`.
    pub fn signed_sum(&self) -> i128 {
        self.by_permutation
            .values()
            .map(|(pi, se, so)| pi.sign() as i128 * (*se as i128 - *so as i128))
            .sum()
    }

    fn merge(mut self, other: ClassifiedCounts) -> ClassifiedCounts {
        for (k, (pi, e, o)) in other.by_permutation {
            let slot = self.by_permutation.entry(k).or_insert((pi, 0, 0));
            slot.1 += e;
            slot.2 += o;
        }
        self
    }
}

pub fn classified_counts(n: usize, limits: Limits) -> Result<ClassifiedCounts, LatinError> {
    limits.check(n)?;
    Ok(fold_leaves(
        n,
        Filter::All,
        ClassifiedCounts::default,
        |acc, leaf| {
            let mut images = [0u8; super::search::HARD_MAX_ORDER];
            for i in 0..n {
                let j = (0..n).find(|&j| leaf.cells[i * n + j] == 0).unwrap();
                images[i] = j as u8;
            }
            let pi = Permutation::from_images(&images[..n]).unwrap();
            let slot = acc
                .by_permutation
                .entry(pi.lex_rank())
                .or_insert((pi, 0, 0));
            if leaf.symbol_parity == 0 {
                slot.1 += 1;
            } else {
                slot.2 += 1;
            }
        },
        ClassifiedCounts::merge,
    ))
}

/// `sum over pi of sign(pi) * (L^SE(pi) - L^SO(pi))` for odd `n`, which equals
/// `(-1)^(n(n-1)/2) n! (n-1)! AT(n)`.
pub fn lemma21_lhs(n: usize, limits: Limits) -> Result<i128, LatinError> {
    if n.is_multiple_of(2) {
        return Err(LatinError::EvenOrder(n));
    }
    Ok(classified_counts(n, limits)?.signed_sum())
}

/// Checks `AT(n) = R(+,+) - R(-,-)` for `n = 0, 1 mod 4` and the negated
/// relation for `n = 2, 3 mod 4`. Only odd orders are checked; even orders
/// produce an informative report with no expectation.
pub fn zappa_check(n: usize, limits: Limits) -> Result<VerificationReport, LatinError> {
    let started = Instant::now();
    let c = count_summary(n, limits)?;
    let diff = c.reduced_pp as i64 - c.reduced_mm as i64;
    let predicted = if matches!(n % 4, 0 | 1) { diff } else { -diff };
    let mut report = VerificationReport::new("zappa")
        .param("n", n)
        .computed("at", c.at)
        .computed("reduced_pp", c.reduced_pp)
        .computed("reduced_mm", c.reduced_mm)
        .computed("at_from_reduced_split", predicted);
    if n % 2 == 1 {
        report = report.expect("at_from_reduced_split", c.at, Provenance::Derived);
    } else {
        report = report.note("even order: relation reported for information only");
    }
    Ok(report
        .finish()
        .with_timing(started.elapsed(), rayon::current_num_threads()))
}

/// Implied `AT(n)` from a value of the signed classified sum.
pub fn at_from_lemma21(n: usize, lhs: i128) -> Option<i128> {
    let d = factorial(n) * factorial(n - 1);
    (lhs % d == 0).then(|| triangular_sign(n) * lhs / d)
}
