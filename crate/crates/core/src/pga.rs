//! p-covering groups, allowable subgroups and immediate descendants.
//!
//! Descendants are produced from every allowable subspace of the
//! multiplicator and then deduplicated up to isomorphism by fingerprint and
//! an exhaustive isomorphism search, instead of computing automorphism
//! orbits on the subspaces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{abelianization, AbelianInvariants};
use crate::error::GroupError;
use crate::homsearch::{find_isomorphism, verify_isomorphism};
use crate::linalg::{self, Matrix};
use crate::pcp::{Echelon, ExponentVector, PcPresentation, PcRelations, RelationId};
use crate::structure::{
    class_size_histogram, derived_length, element_order_histogram, lower_p_central_series,
    maximal_subgroups, subgroup_abelianization,
};
use crate::table::Group;

/// The p-covering group `G*` of a group `G` of p-class `c`, presented on the
/// generators of `G` followed by a basis of the multiplicator.
#[derive(Clone, Debug)]
pub struct PCover {
    base: PcPresentation,
    cover: PcRelations,
    tails: Vec<(RelationId, Vec<u32>)>,
    nucleus_basis: Matrix,
    nucleus_relations: Vec<RelationId>,
}

impl PCover {
    pub fn base(&self) -> &PcPresentation {
        &self.base
    }

    /// Consistent relations of `G*`; not weighted in general.
    pub fn cover(&self) -> &PcRelations {
        &self.cover
    }

    /// Indices of the multiplicator generators within the cover.
    pub fn tail_indices(&self) -> std::ops::Range<usize> {
        self.base.ngens()..self.cover.ngens()
    }

    pub fn multiplicator_rank(&self) -> usize {
        self.cover.ngens() - self.base.ngens()
    }

    pub fn nucleus_rank(&self) -> usize {
        self.nucleus_basis.len()
    }

    /// Echelonized basis of the nucleus in multiplicator coordinates.
    pub fn nucleus_basis(&self) -> &[Vec<u32>] {
        &self.nucleus_basis
    }

    /// Multiplicator component of the cover's right side for every relation
    /// of the base presentation, in canonical relation order.
    pub fn relation_tails(&self) -> &[(RelationId, Vec<u32>)] {
        &self.tails
    }

    pub fn source_class(&self) -> u32 {
        self.base.p_class()
    }

    pub fn cover_log_order(&self) -> usize {
        self.cover.ngens()
    }
}

fn defining_relations(pres: &PcPresentation) -> Vec<RelationId> {
    pres.definitions().iter().flatten().map(|&d| RelationId::from(d)).collect()
}

/// Computes the p-covering group: one central tail per non-defining
/// relation, reduced by the linear relations the overlap tests impose.
pub fn p_cover(pres: &PcPresentation) -> Result<PCover, GroupError> {
    let n = pres.ngens();
    let p = pres.p();
    if let Some(k) = (0..n).find(|&k| pres.weight(k) > 1 && pres.definition(k).is_none()) {
        return Err(GroupError::MissingDefinition(k));
    }
    let defining = defining_relations(pres);
    let ids = pres.relations().relation_ids();
    let tailed: Vec<RelationId> = ids.iter().copied().filter(|r| !defining.contains(r)).collect();
    let t = tailed.len();

    let extended = with_tails(pres, n + t, |rel| {
        let mut tail = vec![0u32; t];
        if let Some(s) = tailed.iter().position(|&r| r == rel) {
            tail[s] = 1;
        }
        tail
    })?;
    let mut rows: Matrix = Vec::new();
    for failure in extended.overlap_failures(n) {
        let (lhs, rhs) = (failure.lhs.as_slice(), failure.rhs.as_slice());
        if lhs[..n] != rhs[..n] {
            return Err(GroupError::Internal(format!(
                "overlap {:?} disagrees outside the tails",
                failure.kind
            )));
        }
        rows.push((n..n + t).map(|k| (lhs[k] + p - rhs[k]) % p).collect());
    }
    if rows.is_empty() {
        rows.push(vec![0; t]);
    }
    let pivots = linalg::rref(&mut rows, p);
    let free: Vec<usize> = (0..t).filter(|c| !pivots.contains(c)).collect();
    let r = free.len();
    let tail_vector = |s: usize| -> Vec<u32> {
        if let Some(f) = free.iter().position(|&c| c == s) {
            let mut v = vec![0u32; r];
            v[f] = 1;
            v
        } else {
            let row = &rows[pivots.iter().position(|&c| c == s).expect("pivot")];
            free.iter().map(|&c| (p - row[c]) % p).collect()
        }
    };
    let tails: Vec<(RelationId, Vec<u32>)> = ids
        .iter()
        .map(|&rel| {
            let v = match tailed.iter().position(|&x| x == rel) {
                Some(s) => tail_vector(s),
                None => vec![0u32; r],
            };
            (rel, v)
        })
        .collect();
    let cover = with_tails(pres, n + r, |rel| {
        tails.iter().find(|(x, _)| *x == rel).map(|(_, v)| v.clone()).expect("all relations listed")
    })?;
    if !cover.is_consistent() {
        return Err(GroupError::Internal("covering presentation is inconsistent".into()));
    }

    let c = pres.p_class();
    let nucleus_relations: Vec<RelationId> = ids
        .iter()
        .copied()
        .filter(|&rel| match rel {
            RelationId::Power(k) => pres.weight(k) == c,
            RelationId::Commutator(j, i) => pres.weight(j) == c && pres.weight(i) == 1,
        })
        .collect();
    let mut nucleus_basis: Matrix = nucleus_relations
        .iter()
        .map(|&rel| {
            if !pres.relations().relation_rhs(rel).is_identity() {
                return Err(GroupError::Internal(format!("{rel} has a nontrivial right side of weight above the class")));
            }
            Ok(tails.iter().find(|(x, _)| *x == rel).unwrap().1.clone())
        })
        .collect::<Result<_, _>>()?;
    linalg::rref(&mut nucleus_basis, p);
    if nucleus_basis != last_term_in_tails(&cover, n, c, p) {
        return Err(GroupError::Internal(
            "nucleus from relations disagrees with the lower exponent-p central series of the cover".into(),
        ));
    }
    Ok(PCover {
        base: pres.clone(),
        cover,
        tails,
        nucleus_basis,
        nucleus_relations,
    })
}

/// Relations on `total` generators: those of `pres` with the tail vector
/// returned by `tail` appended to every right side; the extra generators are
/// central of exponent p.
fn with_tails(
    pres: &PcPresentation,
    total: usize,
    tail: impl Fn(RelationId) -> Vec<u32>,
) -> Result<PcRelations, GroupError> {
    let n = pres.ngens();
    let rels = pres.relations();
    let rhs = |rel: RelationId| {
        let mut v = rels.relation_rhs(rel).as_slice().to_vec();
        v.extend(tail(rel));
        debug_assert_eq!(v.len(), total);
        ExponentVector::from_vec(v)
    };
    let id = ExponentVector::identity(total);
    let power: Vec<ExponentVector> = (0..total)
        .map(|i| if i < n { rhs(RelationId::Power(i)) } else { id.clone() })
        .collect();
    let mut comm = Vec::with_capacity(total * total.saturating_sub(1) / 2);
    for j in 1..total {
        for i in 0..j {
            comm.push(if j < n { rhs(RelationId::Commutator(j, i)) } else { id.clone() });
        }
    }
    Ok(PcRelations::new(pres.p(), total, power, comm)?)
}

/// `P_c` of the cover, computed directly from its definition, as an
/// echelonized subspace of the tail coordinates.
fn last_term_in_tails(cover: &PcRelations, n: usize, c: u32, p: u32) -> Matrix {
    let total = cover.ngens();
    let gens: Vec<ExponentVector> = (0..total).map(|k| ExponentVector::unit(total, k)).collect();
    let mut term: Vec<ExponentVector> = gens.clone();
    for _ in 0..c {
        let mut seeds = Vec::new();
        for x in &term {
            seeds.push(cover.pow(x, u64::from(p)));
            for g in &gens {
                seeds.push(cover.comm(x, g));
            }
        }
        let mut next = Echelon::new(total);
        next.extend(cover, seeds, &gens);
        term = next.rows().cloned().collect();
    }
    let mut rows: Matrix = term
        .iter()
        .map(|v| {
            debug_assert!(v.as_slice()[..n].iter().all(|&a| a == 0));
            v.as_slice()[n..].to_vec()
        })
        .collect();
    if rows.is_empty() {
        return Vec::new();
    }
    linalg::rref(&mut rows, p);
    rows
}

/// A proper subspace `U` of the multiplicator with `U + N = M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllowableSubgroup {
    /// Echelonized basis in multiplicator coordinates (possibly empty).
    pub basis: Vec<Vec<u32>>,
}

impl AllowableSubgroup {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// All allowable subspaces, grouped by increasing codimension and, within
/// one codimension, ordered by the echelon form of their annihilator.
pub fn allowable_subgroups(cover: &PCover) -> Vec<AllowableSubgroup> {
    let p = cover.base.p();
    let r = cover.multiplicator_rank();
    let nucleus = &cover.nucleus_basis;
    let mut out = Vec::new();
    for s in 1..=nucleus.len() {
        for a in linalg::rref_matrices(s, r, p) {
            // U + N = M iff the annihilator of U has full rank on N.
            let restricted: Matrix = a
                .iter()
                .map(|row| {
                    nucleus
                        .iter()
                        .map(|v| row.iter().zip(v).map(|(x, y)| x * y).sum::<u32>() % p)
                        .collect()
                })
                .collect();
            if linalg::rank(&restricted, p) == s {
                let pivots: Vec<usize> = a.iter().map(|row| row.iter().position(|&x| x != 0).unwrap()).collect();
                out.push(AllowableSubgroup {
                    basis: linalg::null_space(&a, &pivots, r, p),
                });
            }
        }
    }
    out
}

fn is_allowable(cover: &PCover, u: &AllowableSubgroup) -> bool {
    let p = cover.base.p();
    let r = cover.multiplicator_rank();
    if u.dim() >= r || u.basis.iter().any(|v| v.len() != r) {
        return false;
    }
    let mut both: Matrix = u.basis.clone();
    both.extend(cover.nucleus_basis.iter().cloned());
    linalg::rank(&both, p) == r
}

/// Presentation of `G* / U`, an immediate descendant of p-class `c + 1`.
pub fn quotient_by(cover: &PCover, u: &AllowableSubgroup) -> Result<PcPresentation, GroupError> {
    if !is_allowable(cover, u) {
        return Err(GroupError::NotAllowable(format!(
            "subspace of dimension {} in a multiplicator of rank {}",
            u.dim(),
            cover.multiplicator_rank()
        )));
    }
    let p = cover.base.p();
    let n = cover.base.ngens();
    let r = cover.multiplicator_rank();
    let mut ub = u.basis.clone();
    let upivots = if ub.is_empty() { Vec::new() } else { linalg::rref(&mut ub, p) };
    let keep: Vec<usize> = (0..r).filter(|c| !upivots.contains(c)).collect();
    let project = |v: &[u32]| -> Vec<u32> {
        let mut w = v.to_vec();
        linalg::reduce(&mut w, &ub, &upivots, p);
        keep.iter().map(|&c| w[c]).collect()
    };
    let q = keep.len();
    // Nucleus relations whose images in M/U are independent become the new
    // generators, each defined by its relation.
    let mut picked: Matrix = Vec::new();
    let mut echelon: Matrix = Vec::new();
    for &rel in &cover.nucleus_relations {
        let v = project(&cover.tails.iter().find(|(x, _)| *x == rel).unwrap().1);
        let mut test = echelon.clone();
        test.push(v.clone());
        if linalg::rank(&test, p) > echelon.len() {
            echelon = test;
            picked.push(v);
            if picked.len() == q {
                break;
            }
        }
    }
    let change = linalg::invert(&picked, p)
        .ok_or_else(|| GroupError::Internal("nucleus relations do not span the quotient".into()))?;
    let tails: Vec<(RelationId, Vec<u32>)> = cover
        .tails
        .iter()
        .map(|(rel, v)| (*rel, linalg::vec_mul(&project(v), &change, p)))
        .collect();
    let rels = with_tails(&cover.base, n + q, |rel| {
        tails.iter().find(|(x, _)| *x == rel).unwrap().1.clone()
    })?;
    let pres = PcPresentation::new(rels)?;
    let c = cover.base.p_class();
    if pres.p_class() != c + 1 || (n..n + q).any(|k| pres.weight(k) != c + 1 || pres.definition(k).is_none()) {
        return Err(GroupError::Internal("quotient is not an immediate descendant".into()));
    }
    Ok(pres)
}

/// Isomorphism invariants used to bucket groups before exact testing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Fingerprint {
    pub log_order: usize,
    pub p_class: u32,
    pub abelianization: AbelianInvariants,
    pub derived_length: usize,
    /// `(log_p |G/P_k|, (G/P_k)^ab)` for `k = 1..=c`.
    pub class_quotients: Vec<(usize, AbelianInvariants)>,
    /// Abelianizations of the maximal subgroups, sorted.
    pub ttt: Vec<AbelianInvariants>,
    /// `(element order, count)`
    pub element_orders: Vec<(u64, u64)>,
    /// `(conjugacy class size, number of classes)`
    pub class_sizes: Vec<(u64, u64)>,
}

pub fn fingerprint(g: &Group) -> Result<Fingerprint, GroupError> {
    let pres = g.presentation();
    let p_class = lower_p_central_series(g)?.len() as u32 - 1;
    let class_quotients = (1..=p_class)
        .map(|k| {
            let q = pres.class_quotient(k);
            (q.ngens(), abelianization(&q))
        })
        .collect();
    let mut ttt: Vec<AbelianInvariants> = maximal_subgroups(g)
        .iter()
        .map(|m| subgroup_abelianization(g, &m.subgroup))
        .collect();
    ttt.sort();
    Ok(Fingerprint {
        log_order: pres.ngens(),
        p_class,
        abelianization: abelianization(pres),
        derived_length: derived_length(g),
        class_quotients,
        ttt,
        element_orders: element_order_histogram(g),
        class_sizes: class_size_histogram(g),
    })
}

/// Exact isomorphism test; returns the images of the weight-1 generators of
/// `a` in `b` when isomorphic. Fingerprints are compared first.
pub fn is_isomorphic(a: &PcPresentation, b: &PcPresentation) -> Result<Option<Vec<ExponentVector>>, GroupError> {
    let ga = Group::new(a)?;
    let gb = Group::new(b)?;
    if fingerprint(&ga)? != fingerprint(&gb)? {
        return Ok(None);
    }
    find_isomorphism(a, &gb)
}

/// One isomorphism class of immediate descendants.
#[derive(Clone, Debug)]
pub struct Descendant {
    pub presentation: PcPresentation,
    pub fingerprint: Fingerprint,
    /// Index of the allowable subspace that produced the representative.
    pub subspace: usize,
}

/// A quotient identified with an earlier representative.
#[derive(Clone, Debug, Serialize)]
pub struct Merge {
    pub subspace: usize,
    pub into: usize,
    #[serde(serialize_with = "serialize_vectors")]
    pub witness: Vec<ExponentVector>,
    pub verified: bool,
}

fn serialize_vectors<S: serde::Serializer>(v: &[ExponentVector], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_slice().to_vec()))
}

#[derive(Clone, Debug)]
pub struct DescendantSet {
    pub cover: PCover,
    pub allowable: Vec<AllowableSubgroup>,
    /// Representatives ordered by fingerprint, then by subspace index.
    pub descendants: Vec<Descendant>,
    pub merges: Vec<Merge>,
    /// Pairs with equal fingerprints shown non-isomorphic by exhaustive search.
    pub exhausted_pairs: usize,
}

pub fn immediate_descendants(pres: &PcPresentation) -> Result<DescendantSet, GroupError> {
    descendants_of_cover(p_cover(pres)?)
}

/// Same as [`immediate_descendants`] for an already computed cover.
pub fn descendants_of_cover(cover: PCover) -> Result<DescendantSet, GroupError> {
    let allowable = allowable_subgroups(&cover);
    let quotients: Vec<(PcPresentation, Fingerprint)> = allowable
        .par_iter()
        .map(|u| {
            let q = quotient_by(&cover, u)?;
            let fp = fingerprint(&Group::new(&q)?)?;
            Ok((q, fp))
        })
        .collect::<Result<_, GroupError>>()?;
    let mut buckets: BTreeMap<&Fingerprint, Vec<usize>> = BTreeMap::new();
    for (k, (_, fp)) in quotients.iter().enumerate() {
        buckets.entry(fp).or_default().push(k);
    }
    type BucketResult = (Vec<usize>, Vec<(usize, usize, Vec<ExponentVector>, bool)>, usize);
    let results: Vec<BucketResult> = buckets
        .into_par_iter()
        .map(|(_, members)| {
            let mut reps: Vec<(usize, Group)> = Vec::new();
            let mut merges = Vec::new();
            let mut exhausted = 0;
            for &k in &members {
                let q = &quotients[k].0;
                let mut found = None;
                for (slot, (rk, rg)) in reps.iter().enumerate() {
                    if let Some(w) = find_isomorphism(q, rg)? {
                        let verified = verify_isomorphism(q, &quotients[*rk].0, &w)?;
                        found = Some((slot, w, verified));
                        break;
                    }
                }
                match found {
                    Some((slot, w, verified)) => merges.push((k, slot, w, verified)),
                    None => {
                        exhausted += reps.len();
                        reps.push((k, Group::new(q)?));
                    }
                }
            }
            Ok((reps.into_iter().map(|(k, _)| k).collect(), merges, exhausted))
        })
        .collect::<Result<_, GroupError>>()?;
    let mut descendants = Vec::new();
    let mut merges = Vec::new();
    let mut exhausted_pairs = 0;
    for (reps, bucket_merges, exhausted) in results {
        let offset = descendants.len();
        for &k in &reps {
            descendants.push(Descendant {
                presentation: quotients[k].0.clone(),
                fingerprint: quotients[k].1.clone(),
                subspace: k,
            });
        }
        for (k, slot, witness, verified) in bucket_merges {
            if !verified {
                return Err(GroupError::Internal(format!("isomorphism witness for subspace {k} failed to verify")));
            }
            merges.push(Merge {
                subspace: k,
                into: offset + slot,
                witness,
                verified,
            });
        }
        exhausted_pairs += exhausted;
    }
    merges.sort_by_key(|m| m.subspace);
    Ok(DescendantSet {
        cover,
        allowable,
        descendants,
        merges,
        exhausted_pairs,
    })
}

/// Whether the group has no immediate descendants (trivial nucleus).
pub fn is_terminal(pres: &PcPresentation) -> Result<bool, GroupError> {
    Ok(p_cover(pres)?.nucleus_rank() == 0)
}

/// Rank of the multiplicator minus rank of the nucleus, a lower bound for
/// the relation rank of any pro-p group having `pres` as a quotient of this
/// class.
pub fn relation_rank_gap(pres: &PcPresentation) -> Result<usize, GroupError> {
    let c = p_cover(pres)?;
    Ok(c.multiplicator_rank() - c.nucleus_rank())
}
