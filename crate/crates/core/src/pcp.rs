//! Power-commutator presentations of finite p-groups and symbolic collection.
//!
//! Generators are indexed from 0 internally. A relation `g_i^p = w_i` is stored
//! as `power_rhs[i]`, and `[g_j, g_i] = w_ji` (for `j > i`) as the commutator
//! right side of the pair `(j, i)`. Right sides only involve generators of
//! index strictly greater than the left-side maximum, so every element has a
//! unique normal form `g_0^{a_0} ... g_{n-1}^{a_{n-1}}` with `0 <= a_k < p`
//! once the presentation is consistent.

use std::fmt;

use crate::error::PcpError;

/// Largest prime accepted for a presentation.
pub const MAX_PRIME: u32 = 1 << 16;

/// Exponents of the generators of a presentation, each reduced mod p.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn identity(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn from_vec(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Index of the first nonzero exponent.
    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|&a| a != 0)
    }

    /// Nonzero entries as `(generator, exponent)` pairs in increasing order.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(k, &a)| (k, a))
    }

    /// Copy with `extra` zero entries appended.
    pub fn extended(&self, extra: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(self.0.len() + extra, 0);
        ExponentVector(v)
    }

    /// Copy restricted to the first `n` entries.
    pub fn truncated(&self, n: usize) -> Self {
        ExponentVector(self.0[..n].to_vec())
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = u32;
    fn index(&self, k: usize) -> &u32 {
        &self.0[k]
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// How a generator of weight > 1 is defined in terms of earlier generators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Definition {
    /// `g_k = g_a^p`
    Power(usize),
    /// `g_k = [g_j, g_i]` with `j > i`
    Commutator(usize, usize),
}

/// Identifies one relation of a presentation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum RelationId {
    Power(usize),
    Commutator(usize, usize),
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RelationId::Power(i) => write!(f, "g{}^p", i + 1),
            RelationId::Commutator(j, i) => write!(f, "[g{},g{}]", j + 1, i + 1),
        }
    }
}

impl From<Definition> for RelationId {
    fn from(d: Definition) -> Self {
        match d {
            Definition::Power(a) => RelationId::Power(a),
            Definition::Commutator(j, i) => RelationId::Commutator(j, i),
        }
    }
}

#[inline]
pub(crate) fn pair_index(j: usize, i: usize) -> usize {
    debug_assert!(j > i);
    j * (j - 1) / 2 + i
}

/// The relations of a power-commutator presentation, without any guarantee
/// of consistency. Collection works on any syntactically valid instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcRelations {
    p: u32,
    n: usize,
    power_rhs: Vec<ExponentVector>,
    comm_rhs: Vec<ExponentVector>,
    /// `g_j^{g_i} = g_j w_ji` as sparse normal-form words, indexed like `comm_rhs`.
    conjugates: Vec<Vec<(usize, u32)>>,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PcRelations {
    /// Presentation with all right sides trivial: the elementary abelian
    /// group of rank `n`.
    pub fn trivial(p: u32, n: usize) -> Result<Self, PcpError> {
        let id = ExponentVector::identity(n);
        Self::new(p, n, vec![id.clone(); n], vec![id; n * n.saturating_sub(1) / 2])
    }

    /// `comm_rhs` is indexed by pairs `(j, i)` with `j > i` in the order
    /// `(1,0), (2,0), (2,1), (3,0), ...`.
    pub fn new(
        p: u32,
        n: usize,
        power_rhs: Vec<ExponentVector>,
        comm_rhs: Vec<ExponentVector>,
    ) -> Result<Self, PcpError> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(PcpError::InvalidPrime(p));
        }
        if power_rhs.len() != n || comm_rhs.len() != n * n.saturating_sub(1) / 2 {
            return Err(PcpError::Malformed(format!(
                "expected {} power and {} commutator right sides",
                n,
                n * n.saturating_sub(1) / 2
            )));
        }
        let check = |v: &ExponentVector, lhs_max: usize, rel: RelationId| -> Result<(), PcpError> {
            if v.len() != n {
                return Err(PcpError::Malformed(format!("right side of {rel} has wrong length")));
            }
            for (k, &a) in v.as_slice().iter().enumerate() {
                if a >= p {
                    return Err(PcpError::ExponentOutOfRange { exponent: a, p });
                }
                if a != 0 && k <= lhs_max {
                    return Err(PcpError::NotCollected(rel));
                }
            }
            Ok(())
        };
        for (i, v) in power_rhs.iter().enumerate() {
            check(v, i, RelationId::Power(i))?;
        }
        for j in 1..n {
            for i in 0..j {
                check(&comm_rhs[pair_index(j, i)], j, RelationId::Commutator(j, i))?;
            }
        }
        let mut conjugates = Vec::with_capacity(comm_rhs.len());
        for j in 1..n {
            for i in 0..j {
                let mut w: Vec<(usize, u32)> = vec![(j, 1)];
                w.extend(comm_rhs[pair_index(j, i)].support());
                conjugates.push(w);
            }
        }
        Ok(PcRelations {
            p,
            n,
            power_rhs,
            comm_rhs,
            conjugates,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ngens(&self) -> usize {
        self.n
    }

    pub fn power_rhs(&self, i: usize) -> &ExponentVector {
        &self.power_rhs[i]
    }

    /// Right side of `[g_j, g_i]` for `j > i`.
    pub fn comm_rhs(&self, j: usize, i: usize) -> &ExponentVector {
        &self.comm_rhs[pair_index(j, i)]
    }

    pub fn relation_rhs(&self, rel: RelationId) -> &ExponentVector {
        match rel {
            RelationId::Power(i) => self.power_rhs(i),
            RelationId::Commutator(j, i) => self.comm_rhs(j, i),
        }
    }

    /// All relations in canonical order: powers by generator, then
    /// commutators `(j, i)` lexicographically.
    pub fn relation_ids(&self) -> Vec<RelationId> {
        let mut ids: Vec<RelationId> = (0..self.n).map(RelationId::Power).collect();
        for j in 1..self.n {
            for i in 0..j {
                ids.push(RelationId::Commutator(j, i));
            }
        }
        ids
    }

    pub(crate) fn conjugate_word(&self, j: usize, i: usize) -> &[(usize, u32)] {
        &self.conjugates[pair_index(j, i)]
    }

    fn check_vector(&self, x: &ExponentVector) -> Result<(), PcpError> {
        if x.len() != self.n {
            return Err(PcpError::Malformed(format!(
                "vector of length {} for presentation on {} generators",
                x.len(),
                self.n
            )));
        }
        if let Some(&a) = x.as_slice().iter().find(|&&a| a >= self.p) {
            return Err(PcpError::ExponentOutOfRange { exponent: a, p: self.p });
        }
        Ok(())
    }

    /// `v <- v * g_i`, collecting from the left.
    fn mul_gen_assign(&self, v: &mut [u32], i: usize) {
        let p = self.p;
        let n = self.n;
        let tail_nonzero = v[i + 1..].iter().any(|&a| a != 0);
        if !tail_nonzero {
            v[i] += 1;
            if v[i] == p {
                v[i] = 0;
                v[i + 1..].copy_from_slice(&self.power_rhs[i].as_slice()[i + 1..]);
            }
            return;
        }
        let suffix: Vec<u32> = v[i + 1..].to_vec();
        v[i] += 1;
        let overflow = v[i] == p;
        if overflow {
            v[i] = 0;
        }
        let commutes = (i + 1..n)
            .all(|j| suffix[j - i - 1] == 0 || self.comm_rhs[pair_index(j, i)].is_identity());
        if !overflow && commutes {
            return;
        }
        let mut u = vec![0u32; n];
        if overflow {
            u[i + 1..].copy_from_slice(&self.power_rhs[i].as_slice()[i + 1..]);
        }
        for j in i + 1..n {
            let a = suffix[j - i - 1];
            for _ in 0..a {
                for &(m, e) in self.conjugate_word(j, i) {
                    for _ in 0..e {
                        self.mul_gen_assign(&mut u, m);
                    }
                }
            }
        }
        v[i + 1..].copy_from_slice(&u[i + 1..]);
    }

    fn mul_assign(&self, v: &mut [u32], w: &[u32]) {
        for (k, &e) in w.iter().enumerate() {
            for _ in 0..e {
                self.mul_gen_assign(v, k);
            }
        }
    }

    /// Normal form of a word given as `(generator, exponent)` pairs.
    /// Negative exponents denote powers of the inverse.
    pub fn collect(&self, word: &[(usize, i64)]) -> Result<ExponentVector, PcpError> {
        let mut v = vec![0u32; self.n];
        for &(g, e) in word {
            if g >= self.n {
                return Err(PcpError::GeneratorOutOfRange { index: g, n: self.n });
            }
            if e >= 0 {
                for _ in 0..e {
                    self.mul_gen_assign(&mut v, g);
                }
            } else {
                let inv = self.inverse(&ExponentVector::unit(self.n, g))?;
                for _ in 0..(-e) {
                    self.mul_assign(&mut v, inv.as_slice());
                }
            }
        }
        Ok(ExponentVector(v))
    }

    pub fn multiply(&self, x: &ExponentVector, y: &ExponentVector) -> Result<ExponentVector, PcpError> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(self.mul(x, y))
    }

    pub(crate) fn mul(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let mut v = x.0.clone();
        self.mul_assign(&mut v, &y.0);
        ExponentVector(v)
    }

    pub fn inverse(&self, x: &ExponentVector) -> Result<ExponentVector, PcpError> {
        self.check_vector(x)?;
        Ok(self.inv(x))
    }

    pub(crate) fn inv(&self, x: &ExponentVector) -> ExponentVector {
        // Multiply x on the right by g_k^{e_k} for increasing k, killing each
        // coordinate in turn; the accumulated factors are already collected.
        let mut r = x.0.clone();
        let mut y = vec![0u32; self.n];
        for k in 0..self.n {
            let e = (self.p - r[k]) % self.p;
            for _ in 0..e {
                self.mul_gen_assign(&mut r, k);
            }
            y[k] = e;
        }
        debug_assert!(r.iter().all(|&a| a == 0));
        ExponentVector(y)
    }

    pub fn power(&self, x: &ExponentVector, k: i64) -> Result<ExponentVector, PcpError> {
        self.check_vector(x)?;
        let base = if k < 0 { self.inv(x) } else { x.clone() };
        Ok(self.pow(&base, k.unsigned_abs()))
    }

    pub(crate) fn pow(&self, x: &ExponentVector, mut k: u64) -> ExponentVector {
        let mut result = ExponentVector::identity(self.n);
        let mut base = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// `[x, y] = x^-1 y^-1 x y`
    pub(crate) fn comm(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inv(&yx), &xy)
    }

    /// Runs the overlap tests and reports every failure.
    pub fn consistency_failures(&self) -> Vec<OverlapFailure> {
        self.overlap_failures(self.n)
    }

    /// Overlap tests among the first `limit` generators only; the remaining
    /// ones must be central of exponent p for this to be meaningful.
    pub(crate) fn overlap_failures(&self, limit: usize) -> Vec<OverlapFailure> {
        let n = self.n;
        let p = self.p as u64;
        let mut out = Vec::new();
        let e = |k: usize| ExponentVector::unit(n, k);
        let mut push = |kind: OverlapKind, lhs: ExponentVector, rhs: ExponentVector| {
            if lhs != rhs {
                out.push(OverlapFailure { kind, lhs, rhs });
            }
        };
        for k in 0..limit {
            for j in 0..k {
                for i in 0..j {
                    // (g_k g_j) g_i = g_k (g_j g_i)
                    let lhs = self.mul(&self.mul(&e(k), &e(j)), &e(i));
                    let rhs = self.mul(&e(k), &self.mul(&e(j), &e(i)));
                    push(OverlapKind::Triple(k, j, i), lhs, rhs);
                }
            }
        }
        for j in 0..limit {
            let gj_pm1 = self.pow(&e(j), p - 1);
            for i in 0..j {
                // (g_j^{p-1} g_j) g_i = g_j^{p-1} (g_j g_i)
                let lhs = self.mul(&self.power_rhs[j], &e(i));
                let rhs = self.mul(&gj_pm1, &self.mul(&e(j), &e(i)));
                push(OverlapKind::PowerLeft(j, i), lhs, rhs);
                // (g_j g_i^{p-1}) g_i = g_j (g_i^{p-1} g_i)
                let gi_pm1 = self.pow(&e(i), p - 1);
                let lhs = self.mul(&self.mul(&e(j), &gi_pm1), &e(i));
                let rhs = self.mul(&e(j), &self.power_rhs[i]);
                push(OverlapKind::PowerRight(j, i), lhs, rhs);
            }
            // g_j^p g_j^m = g_j^m g_j^p for every proper overlap length m
            for m in 1..p {
                let gm = self.pow(&e(j), m);
                let lhs = self.mul(&self.power_rhs[j], &gm);
                let rhs = self.mul(&gm, &self.power_rhs[j]);
                push(OverlapKind::PowerSelf(j, m as u32), lhs, rhs);
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency_failures().is_empty()
    }
}

/// Which overlap test failed, with 0-based generator indices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OverlapKind {
    /// `(g_k g_j) g_i` versus `g_k (g_j g_i)`
    Triple(usize, usize, usize),
    /// `g_j^p g_i`
    PowerLeft(usize, usize),
    /// `g_j g_i^p`
    PowerRight(usize, usize),
    /// `g_j^p g_j^m`
    PowerSelf(usize, u32),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OverlapFailure {
    pub kind: OverlapKind,
    pub lhs: ExponentVector,
    pub rhs: ExponentVector,
}

/// Outcome of [`check_consistency`].
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub failures: Vec<OverlapFailure>,
}

pub fn check_consistency(rels: &PcRelations) -> ConsistencyReport {
    let failures = rels.consistency_failures();
    ConsistencyReport {
        consistent: failures.is_empty(),
        failures,
    }
}

/// Induced polycyclic generating sequence of a subgroup, kept in echelon
/// form: `rows[k]`, when present, has leading generator `k` with exponent 1.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    rows: Vec<Option<ExponentVector>>,
}

impl Echelon {
    pub(crate) fn new(n: usize) -> Self {
        Echelon { rows: vec![None; n] }
    }

    pub(crate) fn leading_indices(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&k| self.rows[k].is_some()).collect()
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = &ExponentVector> {
        self.rows.iter().flatten()
    }

    /// Reduces `x` against the rows; returns the normalized residue if `x`
    /// is not in the span.
    fn sift(&self, rels: &PcRelations, mut x: ExponentVector) -> Option<ExponentVector> {
        let p = rels.p();
        while let Some(k) = x.leading_index() {
            let a = x[k];
            match &self.rows[k] {
                Some(r) => {
                    let r_pow = rels.pow(r, u64::from(p - a));
                    x = rels.mul(&x, &r_pow);
                }
                None => {
                    let inv = mod_inverse(a, p);
                    return Some(rels.pow(&x, u64::from(inv)));
                }
            }
        }
        None
    }

    /// Adds `gens` and closes under p-th powers and commutators; when
    /// `normalizers` is given, also under commutators with those elements.
    pub(crate) fn extend(
        &mut self,
        rels: &PcRelations,
        gens: impl IntoIterator<Item = ExponentVector>,
        normalizers: &[ExponentVector],
    ) {
        let p = u64::from(rels.p());
        let mut queue: Vec<ExponentVector> = gens.into_iter().collect();
        while let Some(x) = queue.pop() {
            if let Some(r) = self.sift(rels, x) {
                let k = r.leading_index().expect("nonzero residue");
                queue.push(rels.pow(&r, p));
                for s in self.rows() {
                    queue.push(rels.comm(&r, s));
                }
                for g in normalizers {
                    queue.push(rels.comm(&r, g));
                }
                self.rows[k] = Some(r);
            }
        }
    }
}

pub(crate) fn mod_inverse(a: u32, p: u32) -> u32 {
    let (a, p) = (u64::from(a % p), u64::from(p));
    let mut result = 1u64;
    let mut base = a;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result as u32
}

/// A consistent power-commutator presentation refining the lower exponent-p
/// central series, with recomputed weights and definitions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcPresentation {
    rels: PcRelations,
    weights: Vec<u32>,
    definitions: Vec<Option<Definition>>,
}

impl PcPresentation {
    /// Validates consistency, derives weights from the lower exponent-p
    /// central series, and picks definitions for generators of weight > 1.
    pub fn new(rels: PcRelations) -> Result<Self, PcpError> {
        let failures = rels.consistency_failures();
        if !failures.is_empty() {
            return Err(PcpError::Inconsistent(failures.len()));
        }
        let weights = compute_weights(&rels)?;
        let definitions = find_definitions(&rels, &weights);
        Ok(PcPresentation {
            rels,
            weights,
            definitions,
        })
    }

    /// Builds a presentation whose weights and definitions are known by
    /// construction. Debug builds re-derive and compare them.
    pub(crate) fn from_parts(
        rels: PcRelations,
        weights: Vec<u32>,
        definitions: Vec<Option<Definition>>,
    ) -> Self {
        debug_assert_eq!(compute_weights(&rels).ok().as_ref(), Some(&weights));
        debug_assert_eq!(find_definitions(&rels, &weights), definitions);
        PcPresentation {
            rels,
            weights,
            definitions,
        }
    }

    /// The elementary abelian group of rank `d`.
    pub fn elementary_abelian(p: u32, d: usize) -> Result<Self, PcpError> {
        Self::new(PcRelations::trivial(p, d)?)
    }

    pub fn relations(&self) -> &PcRelations {
        &self.rels
    }

    pub fn p(&self) -> u32 {
        self.rels.p
    }

    pub fn ngens(&self) -> usize {
        self.rels.n
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> u32 {
        self.weights[k]
    }

    pub fn definitions(&self) -> &[Option<Definition>] {
        &self.definitions
    }

    pub fn definition(&self, k: usize) -> Option<Definition> {
        self.definitions[k]
    }

    /// Number of weight-1 generators (the generator rank).
    pub fn rank(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 1).count()
    }

    /// Exponent-p class; 0 for the trivial group.
    pub fn p_class(&self) -> u32 {
        self.weights.last().copied().unwrap_or(0)
    }

    /// `log_p |G|`
    pub fn log_order(&self) -> usize {
        self.rels.n
    }

    /// Number of generators of weight at most `w`, i.e. `log_p |G / P_w(G)|`.
    pub fn gens_up_to_weight(&self, w: u32) -> usize {
        self.weights.iter().take_while(|&&x| x <= w).count()
    }

    /// Whether every generator of weight > 1 carries a definition.
    pub fn has_full_definitions(&self) -> bool {
        (0..self.ngens()).all(|k| self.weights[k] == 1 || self.definitions[k].is_some())
    }

    /// Presentation of `G / P_w(G)`: the generators of weight at most `w`.
    pub fn class_quotient(&self, w: u32) -> PcPresentation {
        let m = self.gens_up_to_weight(w);
        let power_rhs = (0..m).map(|i| self.rels.power_rhs[i].truncated(m)).collect();
        let mut comm_rhs = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for j in 1..m {
            for i in 0..j {
                comm_rhs.push(self.rels.comm_rhs(j, i).truncated(m));
            }
        }
        let rels = PcRelations::new(self.p(), m, power_rhs, comm_rhs).expect("truncation is valid");
        PcPresentation::from_parts(rels, self.weights[..m].to_vec(), self.definitions[..m].to_vec())
    }

    pub fn collect(&self, word: &[(usize, i64)]) -> Result<ExponentVector, PcpError> {
        self.rels.collect(word)
    }

    pub fn multiply(&self, x: &ExponentVector, y: &ExponentVector) -> Result<ExponentVector, PcpError> {
        self.rels.multiply(x, y)
    }

    pub fn inverse(&self, x: &ExponentVector) -> Result<ExponentVector, PcpError> {
        self.rels.inverse(x)
    }

    pub fn power(&self, x: &ExponentVector, k: i64) -> Result<ExponentVector, PcpError> {
        self.rels.power(x, k)
    }

    pub fn identity(&self) -> ExponentVector {
        ExponentVector::identity(self.ngens())
    }

    pub fn generator(&self, k: usize) -> ExponentVector {
        ExponentVector::unit(self.ngens(), k)
    }
}

/// Lower exponent-p central series computed symbolically; returns the
/// number of generators outside each term, failing when a term is not
/// spanned by a final segment of the generators.
pub(crate) fn lower_central_segments(rels: &PcRelations) -> Result<Vec<usize>, PcpError> {
    let n = rels.ngens();
    let p = u64::from(rels.p());
    let gens: Vec<ExponentVector> = (0..n).map(|k| ExponentVector::unit(n, k)).collect();
    let mut current: Vec<ExponentVector> = gens.clone();
    let mut starts = vec![0usize];
    loop {
        let mut next = Echelon::new(n);
        let mut seeds = Vec::new();
        for x in &current {
            seeds.push(rels.pow(x, p));
            for g in &gens {
                seeds.push(rels.comm(x, g));
            }
        }
        next.extend(rels, seeds, &gens);
        let lead = next.leading_indices();
        let start = n - lead.len();
        if lead.iter().enumerate().any(|(t, &k)| k != start + t) {
            return Err(PcpError::NotWeighted);
        }
        let prev = *starts.last().expect("nonempty");
        if start == prev {
            if start != n {
                return Err(PcpError::NotWeighted);
            }
            break;
        }
        starts.push(start);
        if start == n {
            break;
        }
        current = next.rows().cloned().collect();
    }
    Ok(starts)
}

fn compute_weights(rels: &PcRelations) -> Result<Vec<u32>, PcpError> {
    let starts = lower_central_segments(rels)?;
    let n = rels.ngens();
    let mut weights = vec![0u32; n];
    for w in 1..starts.len() {
        for wk in weights.iter_mut().take(starts[w]).skip(starts[w - 1]) {
            *wk = w as u32;
        }
    }
    Ok(weights)
}

/// First relation in canonical order whose right side is exactly `g_k` and
/// whose left side has the right weight: `g_a^p` with `wt(a) = wt(k) - 1`, or
/// `[g_j, g_i]` with `wt(i) = 1` and `wt(j) = wt(k) - 1`.
fn find_definitions(rels: &PcRelations, weights: &[u32]) -> Vec<Option<Definition>> {
    let n = rels.ngens();
    let mut defs = vec![None; n];
    for (k, def) in defs.iter_mut().enumerate() {
        let w = weights[k];
        if w <= 1 {
            continue;
        }
        let target = ExponentVector::unit(n, k);
        *def = rels.relation_ids().into_iter().find_map(|rel| {
            if rels.relation_rhs(rel) != &target {
                return None;
            }
            match rel {
                RelationId::Power(a) if weights[a] + 1 == w => Some(Definition::Power(a)),
                RelationId::Commutator(j, i) if weights[i] == 1 && weights[j] + 1 == w => {
                    Some(Definition::Commutator(j, i))
                }
                _ => None,
            }
        });
    }
    defs
}
