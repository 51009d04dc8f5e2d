//! Row-shifted matrices over a prime order `p`, cell shifts, the diagonal map
//! and the cyclic group action on `B_p`.
//!
//! Rows and columns are indexed `0..p` here. `A(b, k)` has row `i` equal to
//! the `k`-left shift of row `i - 1` (cyclically), i.e. bit `j` of row `i` is
//! bit `(j + i*k) mod p` of the first row `b`.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::matrix::{is_prime, BitMatrix};
use crate::perm::Permutation;
use crate::report::{Provenance, VerificationReport};

/// Largest prime accepted by the shifted-matrix checks.
pub const MAX_SHIFT_PRIME: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("{0} is not an odd prime up to {MAX_SHIFT_PRIME}")]
    NotOddPrime(usize),
    #[error("shift {k} is outside 1..{p}")]
    ShiftOutOfRange { k: usize, p: usize },
    #[error("first row {b:#b} has bits outside the {p} columns")]
    RowOutOfRange { b: u32, p: usize },
    #[error("cells do not form a diagonal of the {p}x{p} grid")]
    NotADiagonal { p: usize },
    #[error("a full sweep of B_{0} is too large; use a sampled sweep")]
    FullSweepTooLarge(usize),
}

pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Down,
}

/// First row `b` (bit `j` = column `j`) and shift `k` of a row-shifted matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftSpec {
    p: usize,
    b: u16,
    k: usize,
}

impl ShiftSpec {
    pub fn new(p: usize, b: u32, k: usize) -> Result<Self, ShiftError> {
        check_prime(p)?;
        if k == 0 || k >= p {
            return Err(ShiftError::ShiftOutOfRange { k, p });
        }
        if b >> p != 0 {
            return Err(ShiftError::RowOutOfRange { b, p });
        }
        Ok(ShiftSpec { p, b: b as u16, k })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn b(&self) -> u16 {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|b|`, the number of ones in the first row.
    pub fn weight(&self) -> u32 {
        self.b.count_ones()
    }
}

fn check_prime(p: usize) -> Result<(), ShiftError> {
    if p.is_multiple_of(2) || p > MAX_SHIFT_PRIME || !is_prime(p as u64) {
        return Err(ShiftError::NotOddPrime(p));
    }
    Ok(())
}

pub fn build_shifted(spec: &ShiftSpec) -> BitMatrix {
    let p = spec.p;
    let rows: Vec<u16> = (0..p)
        .map(|i| {
            (0..p).fold(0u16, |row, j| {
                row | ((spec.b >> ((j + i * spec.k) % p)) & 1) << j
            })
        })
        .collect();
    BitMatrix::from_rows(&rows).expect("p columns fit")
}

/// True if every row (cyclically, row 0 after row `p - 1`) is the `k`-left
/// shift of the previous one.
pub fn is_left_row_shifted(a: &BitMatrix, k: usize) -> bool {
    let p = a.dim();
    let shift_left = |row: u16| {
        let cells: BTreeSet<Cell> = (0..p)
            .filter(|&j| row >> j & 1 == 1)
            .map(|j| (0, j))
            .collect();
        shift_cells(&cells, k as i64, Direction::Left, p)
            .iter()
            .fold(0u16, |r, &(_, j)| r | 1 << j)
    };
    (0..p).all(|i| a.row((i + 1) % p) == shift_left(a.row(i)))
}

/// Left: `(i, j) -> (i, (j - k) mod p)`. Down: `(i, j) -> ((i + k) mod p, j)`.
pub fn shift_cells(
    cells: &BTreeSet<Cell>,
    k: i64,
    direction: Direction,
    p: usize,
) -> BTreeSet<Cell> {
    let m = p as i64;
    cells
        .iter()
        .map(|&(i, j)| match direction {
            Direction::Left => (i, (j as i64 - k).rem_euclid(m) as usize),
            Direction::Down => ((i as i64 + k).rem_euclid(m) as usize, j),
        })
        .collect()
}

/// One cell per row and per column of a `p x p` grid, stored as the
/// permutation `row -> column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagonal {
    perm: Permutation,
}

impl Diagonal {
    pub fn new(perm: Permutation) -> Self {
        Diagonal { perm }
    }

    pub fn from_cells(cells: &BTreeSet<Cell>, p: usize) -> Result<Self, ShiftError> {
        if cells.len() != p {
            return Err(ShiftError::NotADiagonal { p });
        }
        let mut images = vec![u8::MAX; p];
        for &(i, j) in cells {
            if i >= p || j >= p || images[i] != u8::MAX {
                return Err(ShiftError::NotADiagonal { p });
            }
            images[i] = j as u8;
        }
        Permutation::from_images(&images)
            .map(Diagonal::new)
            .map_err(|_| ShiftError::NotADiagonal { p })
    }

    pub fn cells(&self) -> BTreeSet<Cell> {
        (0..self.perm.order())
            .map(|i| (i, self.perm.apply(i)))
            .collect()
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn sign(&self) -> i32 {
        self.perm.sign()
    }

    /// Entries of `a` along the diagonal.
    pub fn values(&self, a: &BitMatrix) -> Vec<bool> {
        (0..self.perm.order())
            .map(|i| a.get(i, self.perm.apply(i)))
            .collect()
    }
}

/// `k`-left shift followed by the 1-down shift.
pub fn diagonal_map(d: &Diagonal, k: usize, p: usize) -> Diagonal {
    let left = shift_cells(&d.cells(), k as i64, Direction::Left, p);
    let down = shift_cells(&left, 1, Direction::Down, p);
    Diagonal::from_cells(&down, p).expect("shifts of a diagonal are diagonals")
}

/// The `p` diagonals on which `A(b, k)` is constant: `i -> (t - i*k) mod p`.
pub fn principal_diagonals(k: usize, p: usize) -> Vec<Diagonal> {
    (0..p)
        .map(|t| {
            let images: Vec<u8> = (0..p)
                .map(|i| ((t as i64 - (i * k) as i64).rem_euclid(p as i64)) as u8)
                .collect();
            Diagonal::new(Permutation::from_images(&images).expect("p prime, k invertible"))
        })
        .collect()
}

/// Every matrix `A(b, k)`, deduplicated, in code order.
pub fn shifted_set(p: usize) -> Result<Vec<BitMatrix>, ShiftError> {
    check_prime(p)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for b in 0..1u32 << p {
        for k in 1..p {
            let a = build_shifted(&ShiftSpec::new(p, b, k)?);
            if seen.insert(a) {
                out.push(a);
            }
        }
    }
    out.sort_by_key(|a| a.to_code().unwrap_or(0));
    Ok(out)
}

/// Number of distinct `A(b, k)` with `|b| = a`, indexed by `a`.
pub fn count_by_weight(p: usize) -> Result<Vec<usize>, ShiftError> {
    let mut counts = vec![0; p + 1];
    for a in shifted_set(p)? {
        counts[a.row(0).count_ones() as usize] += 1;
    }
    Ok(counts)
}

/// `(nu^r, nu^c)` acting on `A`: row `i` moves to `i + r`, column `j` to `j + c`.
pub fn act(a: &BitMatrix, r: usize, c: usize) -> BitMatrix {
    let p = a.dim();
    let rows = Permutation::cyclic(p, r as i64).expect("valid order");
    let cols = Permutation::cyclic(p, c as i64).expect("valid order");
    a.permute_rows(&rows).permute_cols(&cols)
}

/// Membership in `D` by its stabilizer definition: `(nu, nu^k) A = A` for some `0 < k < p`.
pub fn has_shift_stabilizer(a: &BitMatrix) -> bool {
    let p = a.dim();
    (1..p).any(|k| act(a, 1, k) == *a)
}

pub fn orbit(a: &BitMatrix) -> BTreeSet<u128> {
    let p = a.dim();
    let mut out = BTreeSet::new();
    for r in 0..p {
        for c in 0..p {
            out.insert(act(a, r, c).to_code().expect("p <= 11"));
        }
    }
    out
}

#[inline]
fn per_det_term(a: &BitMatrix) -> i128 {
    let sign = if a.sigma0().is_multiple_of(2) { 1 } else { -1 };
    let d = a.determinant();
    if d == 0 {
        return 0;
    }
    sign * a.permanent() * d.pow(a.dim() as u32 - 1)
}

/// `sum over A in D of (-1)^sigma0(A) per(A) det(A)^(p-1)`. Orbits outside
/// `D` have size `p^2`, so this is congruent to the full sum mod `p^2`.
pub fn shifted_term_sum(p: usize) -> Result<i128, ShiftError> {
    Ok(shifted_set(p)?.iter().map(per_det_term).sum())
}

/// Checks `per(A) = |b|` and `det(A) = +-|b| (mod p)` for every `A(b, k)`.
pub fn lemma32_verify(p: usize) -> Result<VerificationReport, ShiftError> {
    check_prime(p)?;
    let started = Instant::now();
    let m = p as i128;
    let mut report = VerificationReport::new("lemma32").param("p", p);
    let mut pairs = 0u64;
    let mut violations = 0u64;
    for b in 0..1u32 << p {
        for k in 1..p {
            let spec = ShiftSpec::new(p, b, k)?;
            let a = build_shifted(&spec);
            let weight = spec.weight() as i128;
            let per = a.permanent();
            let det = a.determinant();
            let per_mod = per.rem_euclid(m);
            let det_mod = det.rem_euclid(m);
            let ok = per_mod == weight.rem_euclid(m)
                && (det_mod == weight.rem_euclid(m) || det_mod == (-weight).rem_euclid(m));
            pairs += 1;
            if !ok {
                violations += 1;
            }
            report = report.detail(json!({
                "b": a.to_strings()[0],
                "k": k,
                "weight": weight as u64,
                "per": per.to_string(),
                "det": det.to_string(),
                "per_mod_p": per_mod as u64,
                "det_mod_p": det_mod as u64,
                "ok": ok,
            }));
        }
    }
    Ok(report
        .computed("pairs_checked", pairs)
        .computed("violations", violations)
        .expect(
            "pairs_checked",
            (1u64 << p) * (p as u64 - 1),
            Provenance::Trivial,
        )
        .expect("violations", 0, Provenance::Paper)
        .finish()
        .with_timing(started.elapsed(), 1))
}

/// How much of `B_p` the orbit check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Every matrix of `B_p` (only sensible for `p = 3`).
    Full,
    /// `count` seeded random matrices plus every member of `D`.
    Sampled { count: usize, seed: u64 },
}

/// Fixed by `(nu, 1)` (all rows equal) or `(1, nu)` (every row constant).
pub fn has_axis_stabilizer(a: &BitMatrix) -> bool {
    let full = (1u16 << a.dim()) - 1;
    let rows = a.rows();
    rows.iter().all(|&r| r == rows[0]) || rows.iter().all(|&r| r == 0 || r == full)
}

/// Largest prime for which every diagonal (`p!` of them) is visited.
pub const MAX_DIAGONAL_PRIME: usize = 7;
/// Largest prime for which [`Sweep::Full`] is accepted.
pub const MAX_FULL_SWEEP_PRIME: usize = 3;

/// Orbit/stabilizer dichotomy for `G = <nu> x <nu>` acting on `B_p`, plus the
/// diagonal-map facts it rests on.
pub fn orbit_dichotomy_check(p: usize, sweep: Sweep) -> Result<VerificationReport, ShiftError> {
    check_prime(p)?;
    let started = Instant::now();
    let d_list = shifted_set(p)?;
    let d_codes: HashSet<u128> = d_list
        .iter()
        .map(|a| a.to_code().expect("p <= 11"))
        .collect();

    if sweep == Sweep::Full && p > MAX_FULL_SWEEP_PRIME {
        return Err(ShiftError::FullSweepTooLarge(p));
    }
    let members: Vec<BitMatrix> = match sweep {
        Sweep::Full => (0u128..1 << (p * p))
            .map(|c| BitMatrix::from_code(c, p).unwrap())
            .collect(),
        Sweep::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<BitMatrix> = (0..count)
                .map(|_| {
                    let rows: Vec<u16> = (0..p).map(|_| rng.random_range(0..1u16 << p)).collect();
                    BitMatrix::from_rows(&rows).unwrap()
                })
                .collect();
            v.extend(d_list.iter().copied());
            v
        }
    };

    let mut seen_orbits: HashSet<u128> = HashSet::new();
    let mut orbit_sizes_full = 0u64;
    let mut orbits_in_d = 0u64;
    let mut bad_orbits = 0u64;
    let mut axis_orbits = 0u64;
    let mut axis_matrices = 0u64;
    let mut axis_nonsingular = 0u64;
    let mut invariant_violations = 0u64;
    let mut definition_mismatches = 0u64;
    for a in &members {
        let code = a.to_code().unwrap();
        if d_codes.contains(&code) != has_shift_stabilizer(a) {
            definition_mismatches += 1;
        }
        let orb = orbit(a);
        let key = *orb.iter().next().unwrap();
        if !seen_orbits.insert(key) {
            continue;
        }
        let all_in_d = orb.iter().all(|c| d_codes.contains(c));
        let any_in_d = orb.iter().any(|c| d_codes.contains(c));
        if orb.len() == p * p && !any_in_d {
            orbit_sizes_full += 1;
        } else if orb.len() < p * p && all_in_d {
            orbits_in_d += 1;
        } else if !any_in_d && has_axis_stabilizer(a) {
            axis_orbits += 1;
            axis_matrices += orb.len() as u64;
            if orb
                .iter()
                .any(|&c| BitMatrix::from_code(c, p).unwrap().determinant() != 0)
            {
                axis_nonsingular += 1;
            }
        } else {
            bad_orbits += 1;
        }
        let (s0, per, det) = (a.sigma0(), a.permanent(), a.determinant());
        for &c in &orb {
            let b = BitMatrix::from_code(c, p).unwrap();
            if b.sigma0() != s0 || b.permanent() != per || b.determinant() != det {
                invariant_violations += 1;
            }
        }
    }

    // diagonal map: period p, fixed points, orbit sizes, sign preservation
    let mut period_violations = 0u64;
    let mut orbit_size_violations = 0u64;
    let mut sign_violations = 0u64;
    let mut fixed_point_mismatches = 0u64;
    let all_diagonals: Vec<Diagonal> = if p <= MAX_DIAGONAL_PRIME {
        Permutation::all(p)
            .expect("valid order")
            .map(Diagonal::new)
            .collect()
    } else {
        Vec::new()
    };
    for k in 1..p {
        let principal: BTreeSet<Diagonal> = principal_diagonals(k, p).into_iter().collect();
        for d in &all_diagonals {
            let mut cur = *d;
            let mut size = 0;
            for step in 1..=p {
                cur = diagonal_map(&cur, k, p);
                if cur.sign() != d.sign() {
                    sign_violations += 1;
                }
                if cur == *d && size == 0 {
                    size = step;
                }
            }
            if cur != *d {
                period_violations += 1;
            }
            if size != 1 && size != p {
                orbit_size_violations += 1;
            }
            if (size == 1) != principal.contains(d) {
                fixed_point_mismatches += 1;
            }
        }
    }

    let expected_d = 2 + ((1usize << p) - 2) * (p - 1);
    let mut report = VerificationReport::new("orbits")
        .param("p", p)
        .param(
            "sweep",
            match sweep {
                Sweep::Full => json!("full"),
                Sweep::Sampled { count, seed } => json!({"sampled": count, "seed": seed}),
            },
        )
        .computed("d_size", d_list.len())
        .computed("matrices_visited", members.len())
        .computed("orbits_of_size_p2", orbit_sizes_full)
        .computed("orbits_inside_d", orbits_in_d)
        .computed("orbits_fixed_by_row_or_column_rotation", axis_orbits)
        .computed(
            "nonsingular_orbits_fixed_by_row_or_column_rotation",
            axis_nonsingular,
        )
        .computed("orbits_breaking_dichotomy", bad_orbits)
        .computed("orbit_invariant_violations", invariant_violations)
        .computed("stabilizer_definition_mismatches", definition_mismatches)
        .computed("diagonal_period_violations", period_violations)
        .computed("diagonal_orbit_size_violations", orbit_size_violations)
        .computed("diagonal_sign_violations", sign_violations)
        .computed("fixed_point_mismatches", fixed_point_mismatches)
        .expect("d_size", expected_d, Provenance::Derived)
        .expect("orbits_breaking_dichotomy", 0, Provenance::Paper)
        .expect(
            "nonsingular_orbits_fixed_by_row_or_column_rotation",
            0,
            Provenance::Derived,
        )
        .expect("orbit_invariant_violations", 0, Provenance::Paper)
        .expect("stabilizer_definition_mismatches", 0, Provenance::Derived)
        .expect("diagonal_period_violations", 0, Provenance::Paper)
        .expect("diagonal_orbit_size_violations", 0, Provenance::Paper)
        .expect("diagonal_sign_violations", 0, Provenance::Paper)
        .expect("fixed_point_mismatches", 0, Provenance::Paper);
    if axis_orbits > 0 {
        report = report.note(
            "orbits stabilized by (nu, 1) or (1, nu) (equal rows, or constant rows) lie outside D with size p; all their members are singular, so they add nothing to the per-det sum",
        );
    }
    if p > MAX_DIAGONAL_PRIME {
        report = report.note("diagonal-map checks skipped above p = 7");
    }
    if sweep == Sweep::Full {
        // every orbit is accounted for: sizes sum to |B_p|
        let covered = orbit_sizes_full as usize * p * p + d_list.len() + axis_matrices as usize;
        report = report
            .computed("matrices_covered_by_orbits", covered)
            .expect(
                "matrices_covered_by_orbits",
                1usize << (p * p),
                Provenance::Trivial,
            );
    }
    Ok(report.finish().with_timing(started.elapsed(), 1))
}
