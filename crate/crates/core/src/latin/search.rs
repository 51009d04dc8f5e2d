//! Cell-by-cell backtracking with per-row and per-column symbol bitmasks.
//!
//! Squares are produced in lexicographic row-major order. Row, column and
//! symbol inversion counts are maintained incrementally so every leaf carries
//! its three parities without recomputation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LatinError, LatinSquare};

/// Enumeration never goes above this order.
pub const HARD_MAX_ORDER: usize = 6;

const CELLS: usize = HARD_MAX_ORDER * HARD_MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    All,
    /// First row and first column are the identity.
    Reduced,
    /// First row is the identity and the main diagonal is constant (hence all 1).
    NormalizedUnipotent,
}

/// Order cap for enumeration; `max_order` above 5 must be requested explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_order: 5 }
    }
}

impl Limits {
    pub fn with_max_order(max_order: usize) -> Self {
        Limits { max_order }
    }

    pub fn check(&self, n: usize) -> Result<(), LatinError> {
        if n == 0 {
            return Err(LatinError::InvalidOrder(0));
        }
        let cap = self.max_order.min(HARD_MAX_ORDER);
        if n > cap {
            return Err(LatinError::OrderAboveCap { n, cap });
        }
        Ok(())
    }
}

/// A completed square as seen by the search, with parities of the inversion
/// counts (0 = even).
pub(crate) struct Leaf<'a> {
    pub cells: &'a [u8],
    pub row_parity: u32,
    pub col_parity: u32,
    pub symbol_parity: u32,
}

#[derive(Clone)]
pub(crate) struct Search {
    n: usize,
    full: u16,
    /// Search stops (emits) at this depth.
    stop: usize,
    /// Backtracking never goes below this depth.
    start: usize,
    depth: usize,
    at_leaf: bool,
    done: bool,
    allowed: [u16; CELLS],
    grid: [u8; CELLS],
    next: [u8; CELLS + 1],
    row_used: [u16; HARD_MAX_ORDER],
    col_used: [u16; HARD_MAX_ORDER],
    symbol_cols: [u16; HARD_MAX_ORDER],
    contrib: [[u8; 3]; CELLS],
    inversions: [u32; 3],
}

impl Search {
    pub(crate) fn new(n: usize, filter: Filter) -> Self {
        assert!((1..=HARD_MAX_ORDER).contains(&n));
        let full = ((1u32 << n) - 1) as u16;
        let mut allowed = [0u16; CELLS];
        for i in 0..n {
            for j in 0..n {
                let fixed = match filter {
                    Filter::All => None,
                    Filter::Reduced if i == 0 => Some(j),
                    Filter::Reduced if j == 0 => Some(i),
                    Filter::Reduced => None,
                    Filter::NormalizedUnipotent if i == 0 => Some(j),
                    Filter::NormalizedUnipotent if i == j => Some(0),
                    Filter::NormalizedUnipotent => None,
                };
                allowed[i * n + j] = fixed.map_or(full, |s| 1 << s);
            }
        }
        Search {
            n,
            full,
            stop: n * n,
            start: 0,
            depth: 0,
            at_leaf: false,
            done: false,
            allowed,
            grid: [0; CELLS],
            next: [0; CELLS + 1],
            row_used: [0; HARD_MAX_ORDER],
            col_used: [0; HARD_MAX_ORDER],
            symbol_cols: [0; HARD_MAX_ORDER],
            contrib: [[0; 3]; CELLS],
            inversions: [0; 3],
        }
    }

    /// Same search truncated at `stop` cells; its leaves are partial grids.
    fn truncated(n: usize, filter: Filter, stop: usize) -> Self {
        let mut s = Self::new(n, filter);
        s.stop = stop.min(n * n);
        s
    }

    /// Subtree below a partial grid produced by a truncated search.
    fn below(&self, prefix: &[u8]) -> Self {
        let mut s = self.clone();
        s.stop = self.n * self.n;
        s.depth = 0;
        s.at_leaf = false;
        s.done = false;
        s.row_used = [0; HARD_MAX_ORDER];
        s.col_used = [0; HARD_MAX_ORDER];
        s.symbol_cols = [0; HARD_MAX_ORDER];
        s.inversions = [0; 3];
        for (d, &sym) in prefix.iter().enumerate() {
            s.place(d, sym);
        }
        s.depth = prefix.len();
        s.start = prefix.len();
        s.next[s.depth] = 0;
        s
    }

    #[inline]
    fn place(&mut self, d: usize, s: u8) {
        let (i, j) = (d / self.n, d % self.n);
        let above = |mask: u16| (mask >> (s + 1)).count_ones() as u8;
        let c = [
            above(self.row_used[i]),
            above(self.col_used[j]),
            (self.symbol_cols[s as usize] >> (j + 1)).count_ones() as u8,
        ];
        for k in 0..3 {
            self.inversions[k] += c[k] as u32;
        }
        self.contrib[d] = c;
        self.grid[d] = s;
        self.row_used[i] |= 1 << s;
        self.col_used[j] |= 1 << s;
        self.symbol_cols[s as usize] |= 1 << j;
    }

    #[inline]
    fn unplace(&mut self, d: usize) {
        let (i, j) = (d / self.n, d % self.n);
        let s = self.grid[d];
        for k in 0..3 {
            self.inversions[k] -= self.contrib[d][k] as u32;
        }
        self.row_used[i] &= !(1 << s);
        self.col_used[j] &= !(1 << s);
        self.symbol_cols[s as usize] &= !(1 << j);
    }

    /// Advances to the next leaf. Returns false once the subtree is exhausted.
    pub(crate) fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        loop {
            if self.depth == self.stop {
                if !self.at_leaf {
                    self.at_leaf = true;
                    return true;
                }
                self.at_leaf = false;
                if self.depth == self.start {
                    self.done = true;
                    return false;
                }
                self.depth -= 1;
                self.unplace(self.depth);
                continue;
            }
            let d = self.depth;
            let (i, j) = (d / self.n, d % self.n);
            let floor = !((1u16 << self.next[d]) - 1);
            let avail =
                self.allowed[d] & !(self.row_used[i] | self.col_used[j]) & self.full & floor;
            if avail != 0 {
                let s = avail.trailing_zeros() as u8;
                self.place(d, s);
                self.next[d] = s + 1;
                self.depth += 1;
                self.next[self.depth] = 0;
            } else {
                if d == self.start {
                    self.done = true;
                    return false;
                }
                self.depth -= 1;
                self.unplace(self.depth);
            }
        }
    }

    #[inline]
    pub(crate) fn leaf(&self) -> Leaf<'_> {
        Leaf {
            cells: &self.grid[..self.stop],
            row_parity: self.inversions[0] & 1,
            col_parity: self.inversions[1] & 1,
            symbol_parity: self.inversions[2] & 1,
        }
    }
}

/// Streams every square of order `n` that passes `filter`, in lexicographic
/// row-major order.
pub fn enumerate(n: usize, filter: Filter, limits: Limits) -> Result<SquareIter, LatinError> {
    limits.check(n)?;
    Ok(SquareIter {
        search: Search::new(n, filter),
    })
}

pub struct SquareIter {
    search: Search,
}

impl Iterator for SquareIter {
    type Item = LatinSquare;

    fn next(&mut self) -> Option<LatinSquare> {
        if self.search.advance() {
            Some(LatinSquare::from_cells_unchecked(
                self.search.n,
                self.search.leaf().cells,
            ))
        } else {
            None
        }
    }
}

/// Splits the search tree at the completed second row and folds every branch
/// independently on the current rayon pool. `init`/`visit`/`merge` must form
/// an order-independent reduction.
pub(crate) fn fold_leaves<T, I, V, M>(n: usize, filter: Filter, init: I, visit: V, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &Leaf<'_>) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let split = (2 * n).min(n * n);
    let mut head = Search::truncated(n, filter, split);
    let mut prefixes = Vec::new();
    while head.advance() {
        prefixes.push(head.leaf().cells.to_vec());
    }
    let template = Search::new(n, filter);
    prefixes
        .par_iter()
        .map(|prefix| {
            let mut s = template.below(prefix);
            let mut acc = init();
            while s.advance() {
                visit(&mut acc, &s.leaf());
            }
            acc
        })
        .reduce(&init, &merge)
}

/// Calls `f` on every square passing `filter`, serially and in order.
pub fn for_each_square<F: FnMut(&LatinSquare)>(
    n: usize,
    filter: Filter,
    limits: Limits,
    mut f: F,
) -> Result<(), LatinError> {
    for square in enumerate(n, filter, limits)? {
        f(&square);
    }
    Ok(())
}
