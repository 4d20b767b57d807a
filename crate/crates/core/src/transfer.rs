//! Transfer maps into maximal subgroups, the transfer target type (abelian
//! invariants of the maximal subgroups) and the transfer kernel type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::AbelianInvariants;
use crate::error::GroupError;
use crate::pcp::ExponentVector;
use crate::structure::{
    derived_subgroup, hyperplane_normals, maximal_subgroups, on_hyperplane, subgroup_abelianization,
    MaximalSubgroup, Subgroup,
};
use crate::table::Group;

/// Abelian invariants of the maximal subgroups, in canonical subgroup order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ttt {
    components: Vec<AbelianInvariants>,
}

impl Ttt {
    pub fn new(components: Vec<AbelianInvariants>) -> Self {
        Ttt { components }
    }

    pub fn components(&self) -> &[AbelianInvariants] {
        &self.components
    }

    /// The components sorted, forgetting which subgroup each came from.
    pub fn multiset(&self) -> Vec<AbelianInvariants> {
        let mut v = self.components.clone();
        v.sort();
        v
    }
}

impl fmt::Display for Ttt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Label of one transfer kernel inside `G^ab = [3,3]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum TktLabel {
    /// The kernel is all of `G^ab`.
    Full,
    /// The kernel is the order-3 subgroup with this 1-based canonical index.
    Line(u8),
    /// The kernel is trivial.
    Trivial,
}

impl TktLabel {
    fn permuted(self, perm: &[u8; 4]) -> TktLabel {
        match self {
            TktLabel::Line(l) => TktLabel::Line(perm[l as usize - 1]),
            other => other,
        }
    }
}

impl fmt::Display for TktLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TktLabel::Full => write!(f, "0"),
            TktLabel::Line(l) => write!(f, "{l}"),
            TktLabel::Trivial => write!(f, "⊥"),
        }
    }
}

/// Transfer kernel type of a group with abelianization `[3,3]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Tkt([TktLabel; 4]);

impl Tkt {
    pub fn new(labels: [TktLabel; 4]) -> Self {
        Tkt(labels)
    }

    /// From digits `0..=4`, with 0 meaning the full group.
    pub fn from_digits(d: [u8; 4]) -> Result<Self, GroupError> {
        let mut labels = [TktLabel::Full; 4];
        for (slot, &x) in labels.iter_mut().zip(&d) {
            *slot = match x {
                0 => TktLabel::Full,
                1..=4 => TktLabel::Line(x),
                _ => return Err(GroupError::TktUndefined(format!("label {x} out of range"))),
            };
        }
        Ok(Tkt(labels))
    }

    pub fn labels(&self) -> &[TktLabel; 4] {
        &self.0
    }

    /// `k'(pi(i)) = pi(k(i))`.
    pub fn permuted(&self, perm: &[u8; 4]) -> Tkt {
        let mut out = [TktLabel::Full; 4];
        for i in 0..4 {
            out[perm[i] as usize - 1] = self.0[i].permuted(perm);
        }
        Tkt(out)
    }
}

impl fmt::Display for Tkt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl FromStr for Tkt {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::TktUndefined(format!("cannot parse {s:?}"));
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let mut labels = [TktLabel::Full; 4];
        for (slot, part) in labels.iter_mut().zip(parts) {
            *slot = match part {
                "0" => TktLabel::Full,
                "1" | "2" | "3" | "4" => TktLabel::Line(part.parse().unwrap()),
                "⊥" | "-" => TktLabel::Trivial,
                _ => return Err(bad()),
            };
        }
        Ok(Tkt(labels))
    }
}

impl Serialize for Tkt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Tkt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn permutations4() -> Vec<[u8; 4]> {
    let mut out = Vec::with_capacity(24);
    for code in 0..256u32 {
        let perm = [0, 1, 2, 3].map(|k| (code >> (2 * k) & 3) as u8 + 1);
        let mut seen = [false; 5];
        if perm.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true)) {
            out.push(perm);
        }
    }
    out
}

/// Whether the two types agree after some relabeling of the four subgroups.
pub fn tkt_equivalent(a: &Tkt, b: &Tkt) -> bool {
    permutations4().iter().any(|perm| a.permuted(perm) == *b)
}

/// Whether some relabeling of `candidate` has, in every position, either
/// the full group or the label of `target`.
pub fn tkt_compatible(candidate: &Tkt, target: &Tkt) -> bool {
    permutations4().iter().any(|perm| {
        let c = candidate.permuted(perm);
        c.0.iter()
            .zip(&target.0)
            .all(|(&x, &t)| x == TktLabel::Full || x == t)
    })
}

/// Minimal code in each left coset `xH` for `x` ranging over `domain`.
/// Entries outside `domain` are `u32::MAX`.
pub(crate) fn min_coset_reps(g: &Group, h: &Subgroup, domain: &[u32]) -> Vec<u32> {
    let mut canon = vec![u32::MAX; g.order()];
    for &x in domain {
        if canon[x as usize] != u32::MAX {
            continue;
        }
        for &y in h.elements() {
            canon[g.mul(x, y) as usize] = x;
        }
    }
    canon
}

/// The transfer `G^ab -> M^ab` tabulated on coset representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMap {
    /// Minimal representatives of the cosets of `G'`.
    pub domain: Vec<ExponentVector>,
    /// Minimal representatives of the image cosets of `M'`, aligned with `domain`.
    pub values: Vec<ExponentVector>,
    /// Elements of `domain` mapping to the identity.
    pub kernel: Vec<ExponentVector>,
}

struct AbelianQuotient {
    reps: Vec<u32>,
}

impl AbelianQuotient {
    fn new(g: &Group, derived: &Subgroup) -> Self {
        let all: Vec<u32> = (0..g.order() as u32).collect();
        let canon = min_coset_reps(g, derived, &all);
        let mut reps: Vec<u32> = canon.iter().copied().enumerate().filter(|&(x, c)| x as u32 == c).map(|(_, c)| c).collect();
        reps.sort_unstable();
        AbelianQuotient { reps }
    }
}

/// Evaluates the transfer on `domain` with the given transversal of `M`,
/// returning minimal representatives modulo `M'`.
fn transfer_values(
    g: &Group,
    m: &Subgroup,
    m_canon: &[u32],
    transversal: &[u32],
    domain: &[u32],
) -> Vec<u32> {
    let mut coset = vec![u32::MAX; g.order()];
    for (i, &t) in transversal.iter().enumerate() {
        for &y in m.elements() {
            coset[g.mul(t, y) as usize] = i as u32;
        }
    }
    let inv_t: Vec<u32> = transversal.iter().map(|&t| g.inv(t)).collect();
    domain
        .iter()
        .map(|&x| {
            let mut v = 0u32;
            for &t in transversal {
                let xt = g.mul(x, t);
                let s = coset[xt as usize] as usize;
                v = g.mul(v, g.mul(inv_t[s], xt));
            }
            m_canon[v as usize]
        })
        .collect()
}

fn check_transversal(g: &Group, m: &Subgroup, transversal: &[u32]) -> Result<(), GroupError> {
    if transversal.len() * m.order() != g.order() {
        return Err(GroupError::Internal("transversal has the wrong size".into()));
    }
    let mut seen = vec![false; g.order()];
    for &t in transversal {
        for &y in m.elements() {
            let z = g.mul(t, y) as usize;
            if seen[z] {
                return Err(GroupError::Internal("transversal repeats a coset".into()));
            }
            seen[z] = true;
        }
    }
    Ok(())
}

/// Transfer into `m` using the transversal of minimal coset representatives.
pub fn transfer_map(g: &Group, m: &Subgroup) -> TransferMap {
    let all: Vec<u32> = (0..g.order() as u32).collect();
    let canon = min_coset_reps(g, m, &all);
    let mut transversal: Vec<u32> = (0..g.order() as u32).filter(|&x| canon[x as usize] == x).collect();
    transversal.sort_unstable();
    transfer_map_with(g, m, &transversal).expect("minimal representatives form a transversal")
}

/// Transfer into `m` using an explicit left transversal.
pub fn transfer_map_with(g: &Group, m: &Subgroup, transversal: &[u32]) -> Result<TransferMap, GroupError> {
    check_transversal(g, m, transversal)?;
    let gd = derived_subgroup(g, &Subgroup::whole(g));
    let ab = AbelianQuotient::new(g, &gd);
    let md = derived_subgroup(g, m);
    let m_canon = min_coset_reps(g, &md, m.elements());
    let values = transfer_values(g, m, &m_canon, transversal, &ab.reps);
    let kernel = ab
        .reps
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v == 0)
        .map(|(&x, _)| g.vector(x))
        .collect();
    Ok(TransferMap {
        domain: ab.reps.iter().map(|&x| g.vector(x)).collect(),
        values: values.iter().map(|&x| g.vector(x)).collect(),
        kernel,
    })
}

/// Transfer data for all maximal subgroups at once.
#[derive(Clone, Debug)]
pub struct TransferSummary {
    pub ttt: Ttt,
    /// For each maximal subgroup, the minimal `G'`-coset representatives
    /// (as codes) lying in the transfer kernel.
    pub kernels: Vec<Vec<u32>>,
    /// Minimal `G'`-coset representative of every element.
    pub ab_canon: Vec<u32>,
    pub tkt: Option<Tkt>,
}

pub fn transfer_summary(g: &Group) -> TransferSummary {
    let maxes = maximal_subgroups(g);
    let gd = derived_subgroup(g, &Subgroup::whole(g));
    let all: Vec<u32> = (0..g.order() as u32).collect();
    let ab_canon = min_coset_reps(g, &gd, &all);
    let reps: Vec<u32> = all.iter().copied().filter(|&x| ab_canon[x as usize] == x).collect();
    let mut components = Vec::with_capacity(maxes.len());
    let mut kernels = Vec::with_capacity(maxes.len());
    for MaximalSubgroup { subgroup: m, .. } in &maxes {
        let md = derived_subgroup(g, m);
        components.push(crate::structure::abelianization_mod(g, m, &md));
        let m_canon = min_coset_reps(g, &md, m.elements());
        let m_reps = min_coset_reps(g, m, &all);
        let transversal: Vec<u32> = all.iter().copied().filter(|&x| m_reps[x as usize] == x).collect();
        let values = transfer_values(g, m, &m_canon, &transversal, &reps);
        kernels.push(
            reps.iter()
                .zip(&values)
                .filter(|(_, &v)| v == 0)
                .map(|(&x, _)| x)
                .collect(),
        );
    }
    let tkt = tkt_from_kernels(g, &reps, &kernels);
    TransferSummary {
        ttt: Ttt::new(components),
        kernels,
        ab_canon,
        tkt,
    }
}

fn tkt_from_kernels(g: &Group, reps: &[u32], kernels: &[Vec<u32>]) -> Option<Tkt> {
    let d = g.presentation().rank();
    // G^ab = [3,3] exactly when p = 3, d = 2 and |G : G'| = 9.
    if g.p() != 3 || d != 2 || reps.len() != 9 {
        return None;
    }
    let lines = hyperplane_normals(3, 2);
    let mut labels = [TktLabel::Full; 4];
    for (slot, ker) in labels.iter_mut().zip(kernels) {
        *slot = match ker.len() {
            9 => TktLabel::Full,
            1 => TktLabel::Trivial,
            3 => {
                let j = lines
                    .iter()
                    .position(|normal| ker.iter().all(|&x| on_hyperplane(g, normal, x)))
                    .expect("an order-3 kernel is one of the four lines");
                TktLabel::Line(j as u8 + 1)
            }
            _ => unreachable!("subgroup orders of [3,3] are 1, 3, 9"),
        };
    }
    Some(Tkt(labels))
}

pub fn compute_ttt(g: &Group) -> Ttt {
    Ttt::new(
        maximal_subgroups(g)
            .iter()
            .map(|m| subgroup_abelianization(g, &m.subgroup))
            .collect(),
    )
}

pub fn compute_tkt(g: &Group) -> Result<Tkt, GroupError> {
    transfer_summary(g).tkt.ok_or_else(|| {
        GroupError::TktUndefined("transfer kernel type needs abelianization [3,3]".into())
    })
}

/// Checks that every transfer kernel of `child` maps into the corresponding
/// kernel of `parent`, where `parent` is the quotient of `child` by a tail of
/// its pc sequence and both have abelianizations of the same order.
///
/// Returns `None` when the abelianizations differ in order and the check does
/// not apply.
pub fn kernels_descend(
    child: &Group,
    child_summary: &TransferSummary,
    parent: &Group,
    parent_summary: &TransferSummary,
) -> Option<bool> {
    let child_ab = child_summary.ab_canon.iter().enumerate().filter(|&(x, &c)| x as u32 == c).count();
    let parent_ab = parent_summary.ab_canon.iter().enumerate().filter(|&(x, &c)| x as u32 == c).count();
    if child_ab != parent_ab || child_summary.kernels.len() != parent_summary.kernels.len() {
        return None;
    }
    let shift = child.p().pow((child.ngens() - parent.ngens()) as u32);
    Some(child_summary.kernels.iter().zip(&parent_summary.kernels).all(|(ck, pk)| {
        ck.iter().all(|&x| {
            let image = parent_summary.ab_canon[(x / shift) as usize];
            pk.binary_search(&image).is_ok()
        })
    }))
}
