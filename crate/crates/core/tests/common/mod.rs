//! Oracles that do not share code with the library: coset enumeration of
//! the presentation read as a finite presentation, and brute-force
//! embedding search between abelian groups.
#![allow(dead_code)]

pub mod checks;
pub mod soundness;

use pgroup_core::pga::immediate_descendants;
use pgroup_core::{ExponentVector, Group, PcPresentation};

const NONE: usize = usize::MAX;

/// Coset table of the trivial subgroup, i.e. the right regular action.
pub struct CosetTable {
    ncols: usize,
    table: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn size(&self) -> usize {
        self.table.len()
    }

    /// Coset reached from `start` along the word (1-based letters, negative
    /// for inverses).
    pub fn walk(&self, start: usize, word: &[i32]) -> usize {
        word.iter().fold(start, |c, &x| self.table[c][col(x)])
    }

    pub fn ngens(&self) -> usize {
        self.ncols / 2
    }
}

fn col(x: i32) -> usize {
    let g = (x.unsigned_abs() - 1) as usize;
    if x > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn inv_col(c: usize) -> usize {
    c ^ 1
}

struct Enumerator {
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    ncols: usize,
    limit: usize,
}

impl Enumerator {
    fn rep(&mut self, mut k: usize) -> usize {
        let mut root = k;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[k] != root {
            let next = self.parent[k];
            self.parent[k] = root;
            k = next;
        }
        root
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Option<()> {
        if self.table.len() >= self.limit {
            return None;
        }
        let d = self.table.len();
        self.table.push(vec![NONE; self.ncols]);
        self.parent.push(d);
        self.table[c][x] = d;
        self.table[d][inv_col(x)] = c;
        Some(())
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k != l {
            let (m, n) = (k.min(l), k.max(l));
            self.parent[n] = m;
            queue.push(n);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.ncols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                self.table[f][inv_col(x)] = NONE;
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][inv_col(x)] != NONE {
                    let t = self.table[f1][inv_col(x)];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][inv_col(x)] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Option<()> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Some(());
            }
            while j >= i as isize && self.table[b][inv_col(w[j as usize])] != NONE {
                b = self.table[b][inv_col(w[j as usize])];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Some(());
            } else if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][inv_col(w[i])] = f;
                return Some(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }
}

/// Coset enumeration in HLT style; `None` if more than `limit` cosets
/// are ever defined.
pub fn todd_coxeter(ngens: usize, relators: &[Vec<i32>], limit: usize) -> Option<CosetTable> {
    let ncols = 2 * ngens;
    let rels: Vec<Vec<usize>> = relators.iter().map(|r| r.iter().map(|&x| col(x)).collect()).collect();
    let mut e = Enumerator { table: vec![vec![NONE; ncols]], parent: vec![0], ncols, limit };
    let mut c = 0;
    while c < e.table.len() {
        for r in &rels {
            if !e.alive(c) {
                break;
            }
            e.scan_and_fill(c, r)?;
        }
        for x in 0..ncols {
            if e.alive(c) && e.table[c][x] == NONE {
                e.define(c, x)?;
            }
        }
        c += 1;
    }
    let live: Vec<usize> = (0..e.table.len()).filter(|&k| e.alive(k)).collect();
    let mut index = vec![NONE; e.table.len()];
    for (k, &c) in live.iter().enumerate() {
        index[c] = k;
    }
    let mut table = Vec::with_capacity(live.len());
    for &c in &live {
        let row = e.table[c].clone();
        table.push(row.into_iter().map(|d| index[e.rep(d)]).collect());
    }
    Some(CosetTable { ncols, table })
}

/// Normal word of an exponent vector.
pub fn word_of(v: &ExponentVector) -> Vec<i32> {
    v.support().flat_map(|(k, e)| std::iter::repeat(k as i32 + 1).take(e as usize)).collect()
}

fn inverse_word(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|&x| -x).collect()
}

/// Power and commutator relators, `[a, b] = a^-1 b^-1 a b`.
pub fn relators(pres: &PcPresentation) -> Vec<Vec<i32>> {
    let rels = pres.relations();
    let n = pres.ngens();
    let p = pres.p() as usize;
    let mut out = Vec::new();
    for i in 0..n {
        let mut r = vec![i as i32 + 1; p];
        r.extend(inverse_word(&word_of(rels.power_rhs(i))));
        out.push(r);
    }
    for j in 0..n {
        for i in 0..j {
            let (a, b) = (j as i32 + 1, i as i32 + 1);
            let mut r = vec![-a, -b, a, b];
            r.extend(inverse_word(&word_of(rels.comm_rhs(j, i))));
            out.push(r);
        }
    }
    out
}

/// Checks the materialized multiplication table of `pres` against the
/// regular action found by coset enumeration: the orders agree and
/// `x * y` computed by collection lands on the coset `1 . x . y`.
pub fn agrees_with_coset_enumeration(pres: &PcPresentation) -> Result<(), String> {
    let order = (pres.p() as usize).pow(pres.ngens() as u32);
    let ct = todd_coxeter(pres.ngens(), &relators(pres), 40 * order + 1000)
        .ok_or("coset enumeration exceeded its limit")?;
    if ct.size() != order {
        return Err(format!("coset enumeration found {} cosets, expected {order}", ct.size()));
    }
    let g = Group::new(pres).map_err(|e| e.to_string())?;
    let words: Vec<Vec<i32>> = (0..order as u32).map(|x| word_of(&g.vector(x))).collect();
    let place: Vec<usize> = words.iter().map(|w| ct.walk(0, w)).collect();
    let mut seen = vec![false; order];
    for &c in &place {
        if std::mem::replace(&mut seen[c], true) {
            return Err("two normal words reach the same coset".into());
        }
    }
    for x in 0..order as u32 {
        for y in 0..order as u32 {
            let expected = ct.walk(place[x as usize], &words[y as usize]);
            if place[g.mul(x, y) as usize] != expected {
                return Err(format!("product of {} and {} disagrees", g.vector(x), g.vector(y)));
            }
        }
    }
    Ok(())
}

/// Every descendant of the elementary abelian group of rank 2 with at most
/// `max_log` generators, one per isomorphism class, root included.
pub fn two_generator_groups(max_log: usize) -> Vec<PcPresentation> {
    let mut out = vec![PcPresentation::elementary_abelian(3, 2).unwrap()];
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for q in &frontier {
            if q.ngens() >= max_log {
                continue;
            }
            for d in immediate_descendants(q).unwrap().descendants {
                if d.presentation.ngens() <= max_log {
                    next.push(d.presentation);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Abelian p-group `Z/p^a1 x ...` given by exponents, elements encoded in
/// mixed radix.
pub struct Abelian {
    pub moduli: Vec<u64>,
    sum: Vec<u32>,
}

impl Abelian {
    pub fn new(moduli: Vec<u64>) -> Self {
        let n = moduli.iter().product::<u64>() as usize;
        let coords = |mut x: usize| -> Vec<u64> {
            moduli
                .iter()
                .map(|&m| {
                    let c = x as u64 % m;
                    x /= m as usize;
                    c
                })
                .collect()
        };
        let all: Vec<Vec<u64>> = (0..n).map(coords).collect();
        let mut sum = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let mut z = 0usize;
                for ((u, v), &m) in all[x].iter().zip(&all[y]).zip(&moduli).rev() {
                    z = z * m as usize + ((u + v) % m) as usize;
                }
                sum[x * n + y] = z as u32;
            }
        }
        Abelian { moduli, sum }
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.sum[x * self.order() + y] as usize
    }

    /// Subgroup generated by `h` and `y`, as a membership vector.
    fn extend(&self, h: &[bool], y: usize) -> Vec<bool> {
        let mut out = h.to_vec();
        let mut frontier: Vec<usize> = (0..h.len()).filter(|&x| h[x]).collect();
        while let Some(x) = frontier.pop() {
            let z = self.add(x, y);
            if !out[z] {
                out[z] = true;
                frontier.push(z);
            }
        }
        out
    }
}

/// Whether `Z/e1 x Z/e2 x ...` embeds in `a`, by backtracking over images
/// of the generators, largest first. For finite abelian groups this is the
/// same as being a quotient of `a`.
pub fn embeds(b: &[u64], a: &Abelian) -> bool {
    let n = a.order();
    let mut b = b.to_vec();
    b.sort_unstable_by(|x, y| y.cmp(x));
    let order_of = |x: usize| {
        let (mut k, mut y) = (1u64, x);
        while y != 0 {
            y = a.add(y, x);
            k += 1;
        }
        k
    };
    let orders: Vec<u64> = (0..n).map(order_of).collect();
    let mut trivial = vec![false; n];
    trivial[0] = true;
    fn go(
        i: usize,
        h: Vec<bool>,
        size: u64,
        b: &[u64],
        a: &Abelian,
        orders: &[u64],
        dead: &mut std::collections::HashSet<(usize, Vec<bool>)>,
    ) -> bool {
        if i == b.len() {
            return true;
        }
        if dead.contains(&(i, h.clone())) {
            return false;
        }
        let mut tried = std::collections::HashSet::new();
        for x in 0..h.len() {
            if orders[x] != b[i] || h[x] {
                continue;
            }
            let next = a.extend(&h, x);
            let grown = next.iter().filter(|&&m| m).count() as u64;
            if grown == size * b[i] && tried.insert(next.clone()) && go(i + 1, next, grown, b, a, orders, dead) {
                return true;
            }
        }
        dead.insert((i, h));
        false
    }
    go(0, trivial, 1, &b, a, &orders, &mut std::collections::HashSet::new())
}

/// Partitions of `n` as non-increasing part lists.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
