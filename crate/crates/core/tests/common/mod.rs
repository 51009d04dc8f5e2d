//! Slow, obviously-correct reference implementations shared by the
//! integration tests. Nothing here calls into the library.
#![allow(dead_code)]

/// All permutations of `0..n` (one-line, 0-based), by insertion.
pub fn perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=k {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `(-1)^inversions`.
pub fn sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn naive_per(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    perms(n)
        .iter()
        .map(|p| (0..n).map(|i| a[i][p[i]] as i128).product::<i128>())
        .sum()
}

pub fn cofactor_det(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return a[0][0] as i128;
    }
    let mut total = 0i128;
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = a[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        total += s * a[0][j] as i128 * cofactor_det(&minor);
    }
    total
}

/// Entry `(i, j)` is bit `i*n + j` of `code`.
pub fn code_rows(code: u64, n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| ((code >> (i * n + j)) & 1) as i64).collect())
        .collect()
}

/// Every Latin square of order `n` on symbols `0..n`, built row by row from
/// whole permutations.
pub fn latin_squares(n: usize) -> Vec<Vec<Vec<usize>>> {
    let all = perms(n);
    let mut out = Vec::new();
    let mut cur: Vec<Vec<usize>> = Vec::new();
    fn rec(
        all: &[Vec<usize>],
        n: usize,
        cur: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for p in all {
            if cur.iter().all(|r| (0..n).all(|j| r[j] != p[j])) {
                cur.push(p.clone());
                rec(all, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(&all, n, &mut cur, &mut out);
    out
}

pub fn row_sign(l: &[Vec<usize>]) -> i64 {
    l.iter().map(|r| sign(r)).product()
}

pub fn col_sign(l: &[Vec<usize>]) -> i64 {
    let n = l.len();
    (0..n)
        .map(|j| sign(&(0..n).map(|i| l[i][j]).collect::<Vec<_>>()))
        .product()
}

pub fn symbol_sign(l: &[Vec<usize>]) -> i64 {
    let n = l.len();
    (0..n)
        .map(|s| {
            let p: Vec<usize> = (0..n)
                .map(|i| (0..n).find(|&j| l[i][j] == s).unwrap())
                .collect();
            sign(&p)
        })
        .product()
}

/// Independent counts: `(L_n, L^E - L^O, AT(n), reduced count, R^E - R^O)`.
pub fn latin_counts(n: usize) -> (i64, i64, i64, i64, i64) {
    let mut total = 0;
    let mut eo = 0;
    let mut at = 0;
    let mut reduced = 0;
    let mut red_eo = 0;
    for l in latin_squares(n) {
        let s = row_sign(&l) * col_sign(&l);
        total += 1;
        eo += s;
        let first_row_id = (0..n).all(|j| l[0][j] == j);
        if first_row_id && (0..n).all(|i| l[i][i] == 0) {
            at += s;
        }
        if first_row_id && (0..n).all(|i| l[i][0] == i) {
            reduced += 1;
            red_eo += s;
        }
    }
    (total, eo, at, reduced, red_eo)
}

/// Brute-force `sum over B_n of (-1)^sigma0 * f(per, det)`.
pub fn brute_sum(n: usize, f: impl Fn(i128, i128) -> i128) -> i128 {
    let mut total = 0i128;
    for code in 0u64..1 << (n * n) {
        let a = code_rows(code, n);
        let zeros = a.iter().flatten().filter(|&&v| v == 0).count();
        let s = if zeros % 2 == 0 { 1 } else { -1 };
        total += s * f(naive_per(&a), cofactor_det(&a));
    }
    total
}

pub fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}
