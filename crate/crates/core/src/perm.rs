//! Permutations of `{1..n}` and their signs.
//!
//! Indices are 0-based internally; one-line notation at the API boundary
//! (`from_one_line`, `one_line`, `Display`, serde) is 1-based.
//!
//! Composition is right-to-left: `pi.compose(&rho)` maps `i` to `pi(rho(i))`.
//! Every module in the crate relies on this convention.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported order.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutation order must be between 1 and {MAX_ORDER}, got {0}")]
    InvalidOrder(usize),
    #[error("value {value} at position {position} breaks bijectivity on 1..{n}")]
    NotABijection {
        n: usize,
        position: usize,
        value: usize,
    },
    #[error("cannot compose permutations of orders {0} and {1}")]
    OrderMismatch(usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    n: u8,
    images: [u8; MAX_ORDER],
}

impl Permutation {
    pub fn identity(n: usize) -> Result<Self, PermError> {
        check_order(n)?;
        let mut images = [0u8; MAX_ORDER];
        for (i, slot) in images.iter_mut().enumerate().take(n) {
            *slot = i as u8;
        }
        Ok(Permutation { n: n as u8, images })
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: &[u8]) -> Result<Self, PermError> {
        let n = images.len();
        check_order(n)?;
        let mut seen = 0u32;
        let mut out = [0u8; MAX_ORDER];
        for (position, &v) in images.iter().enumerate() {
            let v = v as usize;
            if v >= n || seen & (1 << v) != 0 {
                return Err(PermError::NotABijection {
                    n,
                    position: position + 1,
                    value: v + 1,
                });
            }
            seen |= 1 << v;
            out[position] = v as u8;
        }
        Ok(Permutation {
            n: n as u8,
            images: out,
        })
    }

    /// Builds a permutation from 1-based one-line notation, e.g. `[2, 3, 1]`.
    pub fn from_one_line(values: &[usize]) -> Result<Self, PermError> {
        let n = values.len();
        check_order(n)?;
        let mut images = Vec::with_capacity(n);
        for (position, &v) in values.iter().enumerate() {
            if v == 0 || v > n {
                return Err(PermError::NotABijection {
                    n,
                    position: position + 1,
                    value: v,
                });
            }
            images.push((v - 1) as u8);
        }
        Self::from_images(&images)
    }

    /// `nu^k` where `nu = (1 2 ... n)` maps `i` to `(i mod n) + 1`.
    pub fn cyclic(n: usize, k: i64) -> Result<Self, PermError> {
        check_order(n)?;
        let shift = k.rem_euclid(n as i64) as usize;
        let mut images = [0u8; MAX_ORDER];
        for (i, slot) in images.iter_mut().enumerate().take(n) {
            *slot = ((i + shift) % n) as u8;
        }
        Ok(Permutation { n: n as u8, images })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n as usize
    }

    /// Image of the 0-based point `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// 0-based images.
    #[inline]
    pub fn images(&self) -> &[u8] {
        &self.images[..self.n as usize]
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.images().iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images()
            .iter()
            .enumerate()
            .all(|(i, &v)| i == v as usize)
    }

    pub fn inversions(&self) -> usize {
        let img = self.images();
        let mut count = 0;
        for i in 0..img.len() {
            for j in i + 1..img.len() {
                if img[i] > img[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Sign via the inversion count.
    pub fn sign(&self) -> i32 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Sign via cycle decomposition: `(-1)^(n - #cycles)`.
    pub fn sign_by_cycles(&self) -> i32 {
        let n = self.order();
        let mut visited = 0u32;
        let mut cycles = 0;
        for start in 0..n {
            if visited & (1 << start) != 0 {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while visited & (1 << i) == 0 {
                visited |= 1 << i;
                i = self.apply(i);
            }
        }
        if (n - cycles).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.n != other.n {
            return Err(PermError::OrderMismatch(self.order(), other.order()));
        }
        let mut images = [0u8; MAX_ORDER];
        for (i, slot) in images.iter_mut().enumerate().take(self.order()) {
            *slot = self.images[other.images[i] as usize];
        }
        Ok(Permutation { n: self.n, images })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = [0u8; MAX_ORDER];
        for i in 0..self.order() {
            images[self.images[i] as usize] = i as u8;
        }
        Permutation { n: self.n, images }
    }

    /// Position of this permutation in the lexicographic order of `Sym(n)`.
    pub fn lex_rank(&self) -> u64 {
        let n = self.order();
        let mut rank = 0u64;
        let mut used = 0u32;
        for i in 0..n {
            let v = self.images[i] as u32;
            let smaller_unused = (v - (used & ((1 << v) - 1)).count_ones()) as u64;
            rank = rank * (n - i) as u64 + smaller_unused;
            used |= 1 << v;
        }
        rank
    }

    /// All of `Sym(n)` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Result<SymIter, PermError> {
        Ok(SymIter {
            next: Some(Self::identity(n)?),
        })
    }

    /// Lexicographic successor, or `None` for the last permutation.
    pub fn next_lex(&self) -> Option<Permutation> {
        let n = self.order();
        let mut images = self.images;
        let a = &mut images[..n];
        let i = (0..n.saturating_sub(1)).rev().find(|&i| a[i] < a[i + 1])?;
        let j = (i + 1..n).rev().find(|&j| a[j] > a[i]).unwrap();
        a.swap(i, j);
        a[i + 1..].reverse();
        Some(Permutation { n: self.n, images })
    }
}

fn check_order(n: usize) -> Result<(), PermError> {
    if n == 0 || n > MAX_ORDER {
        Err(PermError::InvalidOrder(n))
    } else {
        Ok(())
    }
}

pub struct SymIter {
    next: Option<Permutation>,
}

impl Iterator for SymIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        self.next = current.next_lex();
        Some(current)
    }
}

/// `n!`, exact for `n <= 33`.
pub fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// `(-1)^(n(n-1)/2)`, the sign attached to the full monomial in the coefficient formulas.
pub fn triangular_sign(n: usize) -> i128 {
    if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.one_line().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_line().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_one_line(&values).map_err(serde::de::Error::custom)
    }
}
