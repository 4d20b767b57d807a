//! Abelian invariants, Smith normal form and the quotient order on finite
//! abelian p-groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::pcp::PcPresentation;

/// Orders of the cyclic factors of a finite abelian p-group, ascending.
/// `[3, 9]` is `C3 x C9`; the empty list is the trivial group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianInvariants(Vec<u64>);

impl AbelianInvariants {
    /// Sorts the factors and drops trivial ones.
    pub fn new(mut factors: Vec<u64>) -> Self {
        factors.retain(|&f| f > 1);
        factors.sort_unstable();
        AbelianInvariants(factors)
    }

    pub fn trivial() -> Self {
        AbelianInvariants(Vec::new())
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn is_elementary(&self, p: u64) -> bool {
        self.0.iter().all(|&f| f == p)
    }

    /// The prime all factors are powers of, if any.
    pub fn prime(&self) -> Option<u64> {
        let first = *self.0.first()?;
        let mut q = 2;
        while first % q != 0 {
            q += 1;
        }
        Some(q)
    }

    /// Number of elements of order dividing `p^k`, given the prime `p`.
    pub fn omega_count(&self, p: u64, k: u32) -> u64 {
        let bound = p.pow(k);
        self.0.iter().map(|&f| f.min(bound)).product()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Elementary divisors `d_1 | d_2 | ...` of an integer matrix, one per
/// diagonal position (`min(rows, cols)` entries, zeros for free rank).
pub fn smith_normal_form(matrix: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let diag_len = rows.min(cols);
    let mut t = 0;
    while t < diag_len {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && pivot.map_or(true, |(pi, pj)| x.abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                    if a[t][j].abs() < a[t][t].abs() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                }
            }
            if clean {
                // Divisibility: fold any entry not divisible by the pivot into row t.
                let mut offender = None;
                'scan: for (i, row) in a.iter().enumerate().skip(t + 1) {
                    for x in row.iter().skip(t + 1) {
                        if !(x % &a[t][t]).is_zero() {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        for j in t..cols {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                    }
                    None => break,
                }
            }
        }
        t += 1;
    }
    (0..diag_len).map(|k| a[k][k].abs()).collect()
}

/// Abelian invariants of `G / [G, G]` from the relation matrix of the
/// presentation.
pub fn abelianization(pres: &PcPresentation) -> AbelianInvariants {
    let rels = pres.relations();
    let n = pres.ngens();
    let p = i64::from(pres.p());
    let mut matrix = Vec::new();
    for i in 0..n {
        let mut row: Vec<i64> = rels.power_rhs(i).as_slice().iter().map(|&a| -i64::from(a)).collect();
        row[i] += p;
        matrix.push(row);
    }
    for j in 1..n {
        for i in 0..j {
            let w = rels.comm_rhs(j, i);
            if !w.is_identity() {
                matrix.push(w.as_slice().iter().map(|&a| i64::from(a)).collect());
            }
        }
    }
    invariants_from_matrix(&matrix)
}

/// Invariants of `Z^n / rowspace(matrix)`, assuming the quotient is finite.
pub(crate) fn invariants_from_matrix(matrix: &[Vec<i64>]) -> AbelianInvariants {
    if matrix.is_empty() {
        return AbelianInvariants::trivial();
    }
    let divisors = smith_normal_form(matrix);
    let factors = divisors
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| u64::try_from(d).expect("finite abelian quotient"))
        .collect();
    AbelianInvariants::new(factors)
}

/// Whether `b` is an epimorphic image of `a`.
pub fn is_quotient(a: &AbelianInvariants, b: &AbelianInvariants) -> Result<bool, GroupError> {
    if let (Some(pa), Some(pb)) = (a.prime(), b.prime()) {
        if pa != pb {
            return Err(GroupError::PrimeMismatch(pa as u32, pb as u32));
        }
    }
    if b.rank() > a.rank() {
        return Ok(false);
    }
    let a_desc = a.0.iter().rev();
    let b_desc = b.0.iter().rev().chain(std::iter::repeat(&1));
    Ok(a_desc.zip(b_desc).all(|(x, y)| x % y == 0))
}

/// Invariants of the abelian p-group whose counts `|{x : x^{p^k} = 1}|`
/// for `k = 0, 1, 2, ...` are given (stopping once the count is the order).
pub(crate) fn invariants_from_omega_counts(p: u64, counts: &[u64]) -> AbelianInvariants {
    // #factors of order >= p^k is log_p(count_k / count_{k-1}).
    let logp = |mut x: u64| {
        let mut e = 0;
        while x > 1 {
            debug_assert_eq!(x % p, 0);
            x /= p;
            e += 1;
        }
        e
    };
    let at_least: Vec<usize> = counts.windows(2).map(|w| logp(w[1] / w[0])).collect();
    let mut factors = Vec::new();
    for k in 0..at_least.len() {
        let next = at_least.get(k + 1).copied().unwrap_or(0);
        for _ in 0..at_least[k] - next {
            factors.push(p.pow(k as u32 + 1));
        }
    }
    AbelianInvariants::new(factors)
}
