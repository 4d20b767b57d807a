//! Dense linear algebra over `F_p` on small matrices of `u32` entries.

use crate::pcp::mod_inverse;

pub(crate) type Matrix = Vec<Vec<u32>>;

/// Reduced row echelon form in place; zero rows are removed. Returns the
/// pivot column of each remaining row.
pub(crate) fn rref(rows: &mut Matrix, p: u32) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = mod_inverse(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != 0 {
                let f = rows[k][c];
                for j in 0..cols {
                    rows[k][j] = (rows[k][j] + (p - f) * rows[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub(crate) fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Reduces `v` modulo the row space of an RREF matrix.
pub(crate) fn reduce(v: &mut [u32], basis: &[Vec<u32>], pivots: &[usize], p: u32) {
    for (row, &c) in basis.iter().zip(pivots) {
        let f = v[c];
        if f != 0 {
            for (x, &b) in v.iter_mut().zip(row) {
                *x = (*x + (p - f) * b) % p;
            }
        }
    }
}

pub(crate) fn invert(m: &[Vec<u32>], p: u32) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let pivots = rref(&mut aug, p);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row vector times matrix.
pub(crate) fn vec_mul(v: &[u32], m: &[Vec<u32>], p: u32) -> Vec<u32> {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![0u32; cols];
    for (&a, row) in v.iter().zip(m) {
        if a != 0 {
            for (o, &b) in out.iter_mut().zip(row) {
                *o = (*o + a * b) % p;
            }
        }
    }
    out
}

/// Basis of `{x : A x = 0}` for `A` in RREF with the given pivots, as RREF rows.
pub(crate) fn null_space(a: &[Vec<u32>], pivots: &[usize], cols: usize, p: u32) -> Matrix {
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; cols];
        v[f] = 1;
        for (row, &c) in a.iter().zip(pivots) {
            v[c] = (p - row[f] % p) % p;
        }
        basis.push(v);
    }
    rref(&mut basis, p);
    basis
}

/// All `k x n` matrices in RREF of rank `k`, ordered by pivot columns and
/// then lexicographically by free entries.
pub(crate) fn rref_matrices(k: usize, n: usize, p: u32) -> Vec<Matrix> {
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let total = (p as u64).pow(free.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0u32; n]; k];
            for (r, &c) in pivots.iter().enumerate() {
                m[r][c] = 1;
            }
            let mut x = code;
            for &(r, c) in free.iter().rev() {
                m[r][c] = (x % u64::from(p)) as u32;
                x /= u64::from(p);
            }
            out.push(m);
        }
    }
    out
}

/// `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gaussian binomial coefficient `[n choose k]_p`.
#[cfg(test)]
pub(crate) fn gaussian_binomial(n: usize, k: usize, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= p.pow((n - i) as u32) - 1;
        den *= p.pow((i + 1) as u32) - 1;
    }
    num / den
}
