//! Subgroups of materialized groups: closures, derived and lower exponent-p
//! central series, maximal subgroups and abelianizations of subgroups.

use std::collections::BTreeMap;

use crate::abelian::{invariants_from_omega_counts, AbelianInvariants};
use crate::error::GroupError;
use crate::pcp::ExponentVector;
use crate::table::Group;

/// A subgroup of a [`Group`], stored as a sorted list of element codes plus a
/// membership bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    gens: Vec<u32>,
    elements: Vec<u32>,
    member: Vec<u64>,
}

impl Subgroup {
    pub fn trivial(g: &Group) -> Self {
        let mut member = vec![0u64; g.order().div_ceil(64)];
        member[0] = 1;
        Subgroup {
            gens: Vec::new(),
            elements: vec![0],
            member,
        }
    }

    pub fn whole(g: &Group) -> Self {
        let order = g.order();
        let mut member = vec![u64::MAX; order.div_ceil(64)];
        if order % 64 != 0 {
            *member.last_mut().unwrap() = (1u64 << (order % 64)) - 1;
        }
        Subgroup {
            gens: (0..g.ngens()).map(|k| g.generator(k)).collect(),
            elements: (0..order as u32).collect(),
            member,
        }
    }

    /// Builds a subgroup from a predicate known to cut out a subgroup.
    pub(crate) fn from_predicate(g: &Group, gens: Vec<u32>, pred: impl Fn(u32) -> bool) -> Self {
        let mut member = vec![0u64; g.order().div_ceil(64)];
        let mut elements = Vec::new();
        for x in 0..g.order() as u32 {
            if pred(x) {
                member[x as usize / 64] |= 1 << (x % 64);
                elements.push(x);
            }
        }
        Subgroup {
            gens,
            elements,
            member,
        }
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.member[x as usize / 64] >> (x % 64) & 1 == 1
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generator_vectors(&self, g: &Group) -> Vec<ExponentVector> {
        self.gens.iter().map(|&x| g.vector(x)).collect()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.len() <= other.elements.len() && self.elements.iter().all(|&x| other.contains(x))
    }

    /// `<self, s>`, enumerated as a union of right cosets of `self`.
    pub fn extend(&self, g: &Group, s: u32) -> Subgroup {
        if self.contains(s) {
            return self.clone();
        }
        let mut gens = self.gens.clone();
        gens.push(s);
        let mut member = self.member.clone();
        let mut elements = self.elements.clone();
        let mut reps = vec![0u32];
        let mut next = 0;
        while next < reps.len() {
            let x = reps[next];
            next += 1;
            for &t in &gens {
                let y = g.mul(x, t);
                if member[y as usize / 64] >> (y % 64) & 1 == 1 {
                    continue;
                }
                for &k in &self.elements {
                    let z = g.mul(k, y);
                    member[z as usize / 64] |= 1 << (z % 64);
                    elements.push(z);
                }
                reps.push(y);
            }
        }
        elements.sort_unstable();
        Subgroup {
            gens,
            elements,
            member,
        }
    }
}

/// The subgroup generated by `gens`.
pub fn closure(g: &Group, gens: &[u32]) -> Subgroup {
    let mut h = Subgroup::trivial(g);
    for &s in gens {
        h = h.extend(g, s);
    }
    h
}

/// The smallest subgroup containing `gens` that is normalized by every
/// element of `conjugators`.
pub fn normal_closure(g: &Group, gens: &[u32], conjugators: &[u32]) -> Subgroup {
    let mut h = closure(g, gens);
    let mut checked = 0;
    while checked < h.gens.len() {
        let x = h.gens[checked];
        checked += 1;
        for &c in conjugators {
            let y = g.conj(x, c);
            if !h.contains(y) {
                h = h.extend(g, y);
            }
        }
    }
    h
}

/// `[H, K]` for subgroups generated by `a` and `b`, normalized by `conjugators`.
pub fn commutator_subgroup(g: &Group, a: &[u32], b: &[u32], conjugators: &[u32]) -> Subgroup {
    let mut comms = Vec::new();
    for &x in a {
        for &y in b {
            let c = g.comm(x, y);
            if c != 0 {
                comms.push(c);
            }
        }
    }
    normal_closure(g, &comms, conjugators)
}

pub fn derived_subgroup(g: &Group, h: &Subgroup) -> Subgroup {
    commutator_subgroup(g, &h.gens, &h.gens, &h.gens)
}

/// `G = G^(0) > G' > G'' > ... > 1`.
pub fn derived_series(g: &Group) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(g)];
    while series.last().unwrap().order() > 1 {
        let next = derived_subgroup(g, series.last().unwrap());
        series.push(next);
    }
    series
}

pub fn derived_length(g: &Group) -> usize {
    derived_series(g).len() - 1
}

/// `P_0 = G`, `P_{i+1} = [P_i, G] P_i^p`, down to the trivial group.
///
/// Each term is checked against the tail of the pc sequence predicted by the
/// generator weights.
pub fn lower_p_central_series(g: &Group) -> Result<Vec<Subgroup>, GroupError> {
    let pres = g.presentation();
    let whole = Subgroup::whole(g);
    let ggens = whole.gens.clone();
    let mut series = vec![whole];
    while series.last().unwrap().order() > 1 {
        let prev = series.last().unwrap();
        let mut gens = Vec::new();
        for &x in &prev.gens {
            for &y in &ggens {
                gens.push(g.comm(x, y));
            }
            gens.push(g.pow(x, u64::from(g.p())));
        }
        gens.retain(|&x| x != 0);
        let next = normal_closure(g, &gens, &ggens);
        series.push(next);
    }
    for (k, term) in series.iter().enumerate() {
        let start = pres.gens_up_to_weight(k as u32);
        let expected = g.order() / g.p().pow(start as u32) as usize;
        let tail_ok = term.elements.iter().all(|&x| g.digits(x)[..start].iter().all(|&a| a == 0));
        if term.order() != expected || !tail_ok {
            return Err(GroupError::Internal(format!(
                "lower exponent-p central term {k} disagrees with generator weights"
            )));
        }
    }
    Ok(series)
}

pub fn p_class(g: &Group) -> Result<u32, GroupError> {
    Ok(lower_p_central_series(g)?.len() as u32 - 1)
}

/// Normal vectors of the hyperplanes of `F_p^d`: first nonzero entry 1,
/// in lexicographic order.
pub fn hyperplane_normals(p: u32, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (p as usize).pow(d as u32);
    for code in 0..total {
        let mut v = vec![0u32; d];
        let mut c = code;
        for k in (0..d).rev() {
            v[k] = (c % p as usize) as u32;
            c /= p as usize;
        }
        if v.iter().find(|&&a| a != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

/// A maximal subgroup, the kernel of `x -> normal . x` on `G / Phi(G)`.
#[derive(Clone, Debug)]
pub struct MaximalSubgroup {
    pub normal: Vec<u32>,
    pub subgroup: Subgroup,
}

/// Whether the Frattini coordinates of `x` lie on the hyperplane with the
/// given normal vector.
pub fn on_hyperplane(g: &Group, normal: &[u32], x: u32) -> bool {
    let dx = g.digits(x);
    let s: u32 = normal.iter().zip(dx).map(|(&a, &b)| a * u32::from(b)).sum();
    s % g.p() == 0
}

/// All maximal subgroups, in the canonical order of [`hyperplane_normals`].
pub fn maximal_subgroups(g: &Group) -> Vec<MaximalSubgroup> {
    let p = g.p();
    let d = g.presentation().rank();
    let n = g.ngens();
    hyperplane_normals(p, d)
        .into_iter()
        .map(|normal| {
            let mut gens = hyperplane_basis(p, &normal)
                .into_iter()
                .map(|v| v.iter().enumerate().map(|(k, &a)| a * g.place(k)).sum())
                .collect::<Vec<u32>>();
            gens.extend((d..n).map(|k| g.generator(k)));
            let subgroup = Subgroup::from_predicate(g, gens, |x| on_hyperplane(g, &normal, x));
            MaximalSubgroup { normal, subgroup }
        })
        .collect()
}

/// A basis of `{x : normal . x = 0}` in `F_p^d`.
fn hyperplane_basis(p: u32, normal: &[u32]) -> Vec<Vec<u32>> {
    let d = normal.len();
    let lead = normal.iter().position(|&a| a != 0).expect("nonzero normal");
    // normal[lead] == 1, so x_lead = -sum_{k != lead} normal[k] x_k.
    (0..d)
        .filter(|&k| k != lead)
        .map(|k| {
            let mut v = vec![0u32; d];
            v[k] = 1;
            v[lead] = (p - normal[k] % p) % p;
            v
        })
        .collect()
}

/// Abelian invariants of `H / H'`.
pub fn subgroup_abelianization(g: &Group, h: &Subgroup) -> AbelianInvariants {
    let hd = derived_subgroup(g, h);
    abelianization_mod(g, h, &hd)
}

/// Abelian invariants of `H / K` for `K` normal in `H` with abelian quotient.
pub(crate) fn abelianization_mod(g: &Group, h: &Subgroup, k: &Subgroup) -> AbelianInvariants {
    let p = u64::from(g.p());
    // levels[k] = #{x in H : x^{p^k} in K}
    let mut levels: Vec<u64> = Vec::new();
    for &x in &h.elements {
        let mut y = x;
        let mut e = 0;
        while !k.contains(y) {
            y = g.pow(y, p);
            e += 1;
        }
        if levels.len() <= e {
            levels.resize(e + 1, 0);
        }
        levels[e] += 1;
    }
    let kord = k.order() as u64;
    let mut counts = Vec::with_capacity(levels.len());
    let mut acc = 0;
    for c in levels {
        acc += c;
        counts.push(acc / kord);
    }
    invariants_from_omega_counts(p, &counts)
}

/// `(element order, count)` pairs, ascending.
pub fn element_order_histogram(g: &Group) -> Vec<(u64, u64)> {
    let pmap = g.power_map();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for x in 0..g.order() as u32 {
        let mut y = x;
        let mut ord = 1u64;
        while y != 0 {
            y = pmap[y as usize];
            ord *= u64::from(g.p());
        }
        *hist.entry(ord).or_default() += 1;
    }
    hist.into_iter().collect()
}

/// `(class size, number of classes)` pairs, ascending.
pub fn class_size_histogram(g: &Group) -> Vec<(u64, u64)> {
    let gens: Vec<u32> = (0..g.presentation().rank()).map(|k| g.generator(k)).collect();
    let mut seen = vec![false; g.order()];
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut stack = Vec::new();
    for x in 0..g.order() as u32 {
        if seen[x as usize] {
            continue;
        }
        seen[x as usize] = true;
        stack.push(x);
        let mut size = 0u64;
        while let Some(y) = stack.pop() {
            size += 1;
            for &s in &gens {
                let z = g.conj(y, s);
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    stack.push(z);
                }
            }
        }
        *hist.entry(size).or_default() += 1;
    }
    hist.into_iter().collect()
}
