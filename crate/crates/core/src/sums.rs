//! Exhaustive exact sums over all `n x n` (0,1)-matrices.
//!
//! The code space `[0, 2^(n^2))` is cut into contiguous chunks of `2^16`
//! codes; chunks are summed independently on a rayon pool and folded with
//! checked 128-bit addition, so the result does not depend on scheduling.
//! Matrices with an all-zero row or column are skipped (both permanent and
//! determinant vanish there).

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::matrix::{is_prime, BitMatrix, MatrixError};
use crate::perm::{factorial, triangular_sign};
use crate::pool;

/// Largest order accepted by the exhaustive drivers (`2^25` terms).
pub const MAX_SUM_ORDER: usize = 5;

const CHUNK_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumError {
    #[error("{what} is out of reach for {param} = {value}")]
    ResourceCap {
        what: &'static str,
        param: &'static str,
        value: usize,
    },
    #[error("this sum is defined for odd orders only, got {0}")]
    EvenOrder(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),
    #[error("{value} is not divisible by {divisor}")]
    NotDivisible { value: i128, divisor: i128 },
    #[error("exact accumulation overflowed 128 bits")]
    Overflow,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumTask {
    DetPower,
    PerDet,
    DriskoResidue,
    ClassPermanent,
}

impl SumTask {
    pub fn name(self) -> &'static str {
        match self {
            SumTask::DetPower => "det_power_sum",
            SumTask::PerDet => "per_det_sum",
            SumTask::DriskoResidue => "drisko_residue",
            SumTask::ClassPermanent => "class_permanent_sum",
        }
    }
}

/// An exact quotient whose divisibility has been asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledValue {
    pub numerator: i128,
    pub denominator: i128,
}

impl ScaledValue {
    fn exact(numerator: i128, denominator: i128) -> Result<Self, SumError> {
        if denominator == 0 || numerator % denominator != 0 {
            return Err(SumError::NotDivisible {
                value: numerator,
                divisor: denominator,
            });
        }
        Ok(ScaledValue {
            numerator,
            denominator,
        })
    }

    pub fn value(&self) -> i128 {
        self.numerator / self.denominator
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumResult {
    pub task: SumTask,
    /// Order `n` (or the prime `p`).
    pub n: usize,
    pub raw_sum: i128,
    pub scaled: Option<ScaledValue>,
    pub residue_mod_p: Option<u64>,
    pub term_count: u64,
    pub elapsed: Duration,
    pub threads: usize,
}

impl SumResult {
    /// `{"task","n","raw_sum","scaled_value","residue_mod_p","term_count","elapsed_ms","threads"}`;
    /// exact integers are decimal strings.
    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let scaled = self.scaled.map(|s| {
            serde_json::json!({
                "numerator": s.numerator.to_string(),
                "denominator": s.denominator.to_string(),
                "value": s.value().to_string(),
            })
        });
        let mut v = serde_json::json!({
            "task": self.task.name(),
            "n": self.n,
            "raw_sum": self.raw_sum.to_string(),
            "scaled_value": scaled,
            "residue_mod_p": self.residue_mod_p,
            "term_count": self.term_count,
            "threads": self.threads,
        });
        if timing {
            v["elapsed_ms"] = serde_json::json!(self.elapsed.as_millis() as u64);
        }
        v
    }
}

impl Serialize for SumResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let serde_json::Value::Object(map) = self.to_json(true) else {
            unreachable!()
        };
        let mut out = serializer.serialize_map(Some(map.len()))?;
        for (k, v) in &map {
            out.serialize_entry(k, v)?;
        }
        out.end()
    }
}

/// Worker count (0 = rayon default) and an optional progress counter that
/// receives the number of codes processed.
#[derive(Debug, Clone, Default)]
pub struct SumConfig {
    pub threads: usize,
    pub progress: Option<Arc<AtomicU64>>,
}

impl SumConfig {
    pub fn threads(threads: usize) -> Self {
        SumConfig {
            threads,
            progress: None,
        }
    }
}

#[inline]
fn zero_sign(a: &BitMatrix) -> i128 {
    if a.sigma0().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `sum over A of term(A)` over every `n x n` (0,1)-matrix without a zero line.
fn exhaustive_sum<F>(n: usize, config: &SumConfig, term: F) -> Result<(i128, u64, usize), SumError>
where
    F: Fn(&BitMatrix) -> i128 + Sync + Send,
{
    let total: u64 = 1 << (n * n);
    let chunk: u64 = total.min(1 << CHUNK_BITS);
    let chunks = total / chunk;
    let progress = config.progress.clone();
    let (sum, threads) = pool::with_threads(config.threads, || {
        let sum = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc: i128 = 0;
                for code in c * chunk..(c + 1) * chunk {
                    let a = BitMatrix::from_code_u64(code, n);
                    if a.has_zero_line() {
                        continue;
                    }
                    acc = acc.checked_add(term(&a)).ok_or(SumError::Overflow)?;
                }
                if let Some(p) = &progress {
                    p.fetch_add(chunk, Ordering::Relaxed);
                }
                Ok(acc)
            })
            .try_reduce(|| 0i128, |x, y| x.checked_add(y).ok_or(SumError::Overflow));
        (sum, pool::current_threads())
    });
    Ok((sum?, total, threads))
}

fn check_order(n: usize, what: &'static str) -> Result<(), SumError> {
    if n == 0 || n > MAX_SUM_ORDER {
        return Err(SumError::ResourceCap {
            what,
            param: "n",
            value: n,
        });
    }
    Ok(())
}

/// `sum over A in B_n of (-1)^sigma0(A) det(A)^n`; the scaled value
/// `(-1)^(n(n-1)/2) * raw` is `L_n^EVEN - L_n^ODD`.
pub fn det_power_sum(n: usize, config: &SumConfig) -> Result<SumResult, SumError> {
    check_order(n, "exhaustive det-power sum")?;
    let started = Instant::now();
    let (raw, terms, threads) = exhaustive_sum(n, config, |a| {
        let d = a.determinant_small() as i128;
        if d == 0 {
            0
        } else {
            zero_sign(a) * d.pow(n as u32)
        }
    })?;
    Ok(SumResult {
        task: SumTask::DetPower,
        n,
        raw_sum: raw,
        scaled: Some(ScaledValue::exact(triangular_sign(n) * raw, 1)?),
        residue_mod_p: None,
        term_count: terms,
        elapsed: started.elapsed(),
        threads,
    })
}

/// `sum over A in B_n of (-1)^sigma0(A) per(A) det(A)^(n-1)` for odd `n`; the
/// scaled value `(-1)^(n(n-1)/2) * raw / (n! (n-1)!)` is `AT(n)`.
pub fn per_det_sum(n: usize, config: &SumConfig) -> Result<SumResult, SumError> {
    per_det_sum_with(n, config, true)
}

/// [`per_det_sum`] with the singular-matrix skip switchable, for checking that
/// the skip does not change the sum.
pub fn per_det_sum_with(
    n: usize,
    config: &SumConfig,
    skip_singular: bool,
) -> Result<SumResult, SumError> {
    if n.is_multiple_of(2) {
        return Err(SumError::EvenOrder(n));
    }
    check_order(n, "exhaustive per-det sum")?;
    let started = Instant::now();
    let (raw, terms, threads) = exhaustive_sum(n, config, |a| {
        let d = a.determinant_small() as i128;
        if d == 0 && skip_singular {
            return 0;
        }
        let per = a.permanent();
        debug_assert!(d.abs() <= 5 && per <= 120);
        zero_sign(a) * per * d.pow(n as u32 - 1)
    })?;
    let divisor = factorial(n) * factorial(n - 1);
    Ok(SumResult {
        task: SumTask::PerDet,
        n,
        raw_sum: raw,
        scaled: Some(ScaledValue::exact(triangular_sign(n) * raw, divisor)?),
        residue_mod_p: None,
        term_count: terms,
        elapsed: started.elapsed(),
        threads,
    })
}

/// Residue computed by the per-det sum, together with the value printed for
/// it in the literature.
pub const DRISKO_DERIVED_RESIDUE: u64 = 1;

fn check_odd_prime(p: usize) -> Result<(), SumError> {
    if p.is_multiple_of(2) || !is_prime(p as u64) {
        return Err(SumError::NotOddPrime(p));
    }
    Ok(())
}

/// `S = per_det_sum(p).raw_sum`, asserts `p | S` and reduces `S / p` mod `p`.
pub fn drisko_residue(p: usize, config: &SumConfig) -> Result<SumResult, SumError> {
    check_odd_prime(p)?;
    check_order(p, "exhaustive per-det sum")?;
    let started = Instant::now();
    let base = per_det_sum(p, config)?;
    let scaled = ScaledValue::exact(base.raw_sum, p as i128)?;
    Ok(SumResult {
        task: SumTask::DriskoResidue,
        n: p,
        raw_sum: base.raw_sum,
        scaled: Some(scaled),
        residue_mod_p: Some(scaled.value().rem_euclid(p as i128) as u64),
        term_count: base.term_count,
        elapsed: started.elapsed(),
        threads: base.threads,
    })
}

/// Largest prime for which the row-class sum is enumerated.
pub const MAX_CLASS_PRIME: usize = 5;

/// `sum of (-1)^sigma0(A) per(A)` over row-canonical representatives `A`
/// with `det(A) != 0 (mod p)`, reduced mod `p`.
///
/// Only classes with distinct rows can have nonzero determinant, so the
/// driver walks the `C(2^p, p)` sets of distinct rows, each listed in
/// strictly decreasing canonical order.
pub fn class_permanent_sum(p: usize, config: &SumConfig) -> Result<SumResult, SumError> {
    check_odd_prime(p)?;
    if p > MAX_CLASS_PRIME {
        return Err(SumError::ResourceCap {
            what: "row-class enumeration",
            param: "p",
            value: p,
        });
    }
    let started = Instant::now();
    let row_values = 1usize << p;
    let to_row = |key: usize| (key as u16).reverse_bits() >> (16 - p);
    let (result, threads) = pool::with_threads(config.threads, || {
        let r = (0..row_values)
            .into_par_iter()
            .map(|first| -> Result<(i128, u64), SumError> {
                let mut acc = 0i128;
                let mut classes = 0u64;
                let mut keys = vec![first; 1];
                walk_decreasing(&mut keys, p, &mut |keys| {
                    classes += 1;
                    let rows: Vec<u16> = keys.iter().map(|&k| to_row(k)).collect();
                    let a = BitMatrix::from_rows(&rows)?;
                    debug_assert!(a.is_canonical());
                    if a.det_mod(p as u64)? != 0 {
                        acc = acc
                            .checked_add(zero_sign(&a) * a.permanent())
                            .ok_or(SumError::Overflow)?;
                    }
                    Ok(())
                })?;
                Ok((acc, classes))
            })
            .try_reduce(
                || (0, 0),
                |x, y| Ok((x.0.checked_add(y.0).ok_or(SumError::Overflow)?, x.1 + y.1)),
            );
        (r, pool::current_threads())
    });
    let (raw, classes) = result?;
    Ok(SumResult {
        task: SumTask::ClassPermanent,
        n: p,
        raw_sum: raw,
        scaled: None,
        residue_mod_p: Some(raw.rem_euclid(p as i128) as u64),
        term_count: classes,
        elapsed: started.elapsed(),
        threads,
    })
}

/// Extends `keys` (already strictly decreasing) to length `len` in every way.
fn walk_decreasing<F>(keys: &mut Vec<usize>, len: usize, visit: &mut F) -> Result<(), SumError>
where
    F: FnMut(&[usize]) -> Result<(), SumError>,
{
    if keys.len() == len {
        return visit(keys);
    }
    let last = *keys.last().unwrap();
    for k in (0..last).rev() {
        keys.push(k);
        walk_decreasing(keys, len, visit)?;
        keys.pop();
    }
    Ok(())
}
