//! Breadth-first search of the descendant tree for the finite quotients of a
//! pro-p group with prescribed abelianization, transfer types and
//! σ-automorphism.
//!
//! Every node is a presentation of p-class `c`. A node is dropped by the
//! first pruning rule that fires:
//!
//! - P1: its abelianization is not a quotient of the target one.
//! - P2: its maximal subgroups cannot be matched to target components of
//!   which they are quotients.
//! - P3: it has no σ-automorphism.
//! - P4: multiplicator rank minus nucleus rank exceeds the relation rank.
//! - P5: its kernel type cannot shrink to the target kernel type.
//! - P6: its maximal subgroups have the same abelianizations as in its
//!   parent and those differ from the target, so they are frozen below it.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{abelianization, is_quotient, AbelianInvariants};
use crate::error::GroupError;
use crate::format::render_presentation;
use crate::pcp::PcPresentation;
use crate::pga::{descendants_of_cover, fingerprint, p_cover, Fingerprint, PCover};
use crate::sigma::{find_sigma, SigmaWitness};
use crate::structure::derived_length;
use crate::table::Group;
use crate::transfer::{kernels_descend, tkt_compatible, tkt_equivalent, transfer_summary, Tkt, TransferSummary, Ttt};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("class {class}: expected {expected} nodes, found {found}")]
    CountMismatch { class: u32, expected: usize, found: usize },
    #[error("transfer kernels of node {child} do not map into those of its parent {parent}")]
    KernelContainment { parent: usize, child: usize },
}

/// The invariants a finite quotient must be compatible with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub p: u32,
    pub gab: AbelianInvariants,
    /// Multiset of abelianizations of the maximal subgroups.
    pub ttt: Vec<AbelianInvariants>,
    #[serde(default)]
    pub tkt: Option<Tkt>,
    pub relation_rank: usize,
    pub max_class: u32,
    /// `(class, number of nodes)` pairs the search must reproduce.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected_level_counts: Vec<(u32, usize)>,
}

impl TargetSpec {
    pub fn from_toml(text: &str) -> Result<Self, SearchError> {
        let goal: TargetSpec = toml::from_str(text).map_err(|e| SearchError::InvalidTarget(e.to_string()))?;
        goal.validate()?;
        Ok(goal)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidTarget(m));
        if self.p < 3 || !(2..self.p).all(|q| self.p % q != 0) {
            return bad(format!("p = {} must be an odd prime", self.p));
        }
        let p = u64::from(self.p);
        let power_of_p = |f: u64| p.pow(f.ilog(p)) == f;
        if !std::iter::once(&self.gab).chain(&self.ttt).flat_map(|a| a.factors()).all(|&f| power_of_p(f)) {
            return bad("invariants must be powers of p".into());
        }
        let d = self.gab.rank();
        if d == 0 {
            return bad("the abelianization must be nontrivial".into());
        }
        let maximal = (p.pow(d as u32) - 1) / (p - 1);
        if self.ttt.len() as u64 != maximal {
            return bad(format!("expected {maximal} transfer targets, found {}", self.ttt.len()));
        }
        if self.tkt.is_some() && (self.p != 3 || self.gab != AbelianInvariants::new(vec![3, 3])) {
            return bad("a kernel type is only defined for abelianization [3,3]".into());
        }
        if self.max_class == 0 {
            return bad("max_class must be at least 1".into());
        }
        Ok(())
    }

    pub fn ttt_multiset(&self) -> Vec<AbelianInvariants> {
        let mut v = self.ttt.clone();
        v.sort();
        v
    }
}

/// A pruning rule that fired, with the data that made it fire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule")]
pub enum Pruned {
    P1 { abelianization: AbelianInvariants },
    /// `unmatched` is a component that is not a quotient of any target
    /// component, when there is one.
    P2 { ttt: Ttt, unmatched: Option<AbelianInvariants> },
    P3,
    P4 { multiplicator_rank: usize, nucleus_rank: usize },
    P5 { tkt: Tkt },
    P6 { ttt: Ttt },
}

impl Pruned {
    pub fn rule(&self) -> Rule {
        match self {
            Pruned::P1 { .. } => Rule::P1,
            Pruned::P2 { .. } => Rule::P2,
            Pruned::P3 => Rule::P3,
            Pruned::P4 { .. } => Rule::P4,
            Pruned::P5 { .. } => Rule::P5,
            Pruned::P6 { .. } => Rule::P6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pruned(Pruned),
    Expanded { children: Vec<usize> },
    /// Passed every rule and has no immediate descendants.
    Terminal,
    /// Passed every rule at the class bound and was not expanded.
    Unexplored,
}

/// P1.
pub fn gab_rule(ab: &AbelianInvariants, target: &TargetSpec) -> Result<Option<Pruned>, GroupError> {
    Ok((!is_quotient(&target.gab, ab)?).then(|| Pruned::P1 { abelianization: ab.clone() }))
}

/// P2: a perfect matching of node components into target components of
/// which they are quotients.
pub fn ttt_rule(ttt: &Ttt, target: &TargetSpec) -> Result<Option<Pruned>, GroupError> {
    let node = ttt.components();
    let goal = &target.ttt;
    if node.len() != goal.len() {
        return Ok(Some(Pruned::P2 { ttt: ttt.clone(), unmatched: None }));
    }
    let mut fits = vec![vec![false; goal.len()]; node.len()];
    for (i, a) in node.iter().enumerate() {
        for (j, b) in goal.iter().enumerate() {
            fits[i][j] = is_quotient(b, a)?;
        }
    }
    if let Some(i) = fits.iter().position(|row| !row.contains(&true)) {
        return Ok(Some(Pruned::P2 { ttt: ttt.clone(), unmatched: Some(node[i].clone()) }));
    }
    Ok((!has_perfect_matching(&fits)).then(|| Pruned::P2 { ttt: ttt.clone(), unmatched: None }))
}

fn has_perfect_matching(fits: &[Vec<bool>]) -> bool {
    fn augment(i: usize, fits: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..owner.len() {
            if fits[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].map_or(true, |k| augment(k, fits, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let cols = fits.first().map_or(0, Vec::len);
    let mut owner = vec![None; cols];
    (0..fits.len()).all(|i| augment(i, fits, &mut vec![false; cols], &mut owner))
}

/// P4.
pub fn rank_rule(cover: &PCover, target: &TargetSpec) -> Option<Pruned> {
    let (m, n) = (cover.multiplicator_rank(), cover.nucleus_rank());
    (m - n > target.relation_rank).then_some(Pruned::P4 { multiplicator_rank: m, nucleus_rank: n })
}

/// P5; does not apply when either side has no kernel type.
pub fn tkt_rule(tkt: Option<&Tkt>, target: &TargetSpec) -> Option<Pruned> {
    match (tkt, &target.tkt) {
        (Some(k), Some(t)) if !tkt_compatible(k, t) => Some(Pruned::P5 { tkt: k.clone() }),
        _ => None,
    }
}

/// P6. Both groups share the Frattini quotient, so maximal subgroups are
/// matched by position.
pub fn stable_ttt_rule(child: &Ttt, parent: &Ttt, target: &TargetSpec) -> Option<Pruned> {
    (child == parent && parent.multiset() != target.ttt_multiset()).then(|| Pruned::P6 { ttt: child.clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Node {
    pub id: usize,
    pub class: u32,
    pub parent: Option<usize>,
    /// Allowable subspace of the parent's cover that produced this node.
    pub subspace: Option<usize>,
    pub presentation: String,
    pub order: u64,
    pub fingerprint: Fingerprint,
    pub abelianization: AbelianInvariants,
    pub ttt: Ttt,
    pub tkt: Option<Tkt>,
    /// Unset when an earlier rule fired.
    pub sigma: Option<bool>,
    pub multiplicator_rank: Option<usize>,
    pub nucleus_rank: Option<usize>,
    pub verdict: Verdict,
    /// Whether the node itself satisfies every final condition.
    pub matches_target: bool,
}

impl Node {
    pub fn presentation(&self) -> PcPresentation {
        crate::format::parse_presentation(&self.presentation).expect("rendered by the search")
    }

    pub fn pruned_by(&self) -> Option<Rule> {
        match &self.verdict {
            Verdict::Pruned(p) => Some(p.rule()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Survivor {
    pub node: usize,
    pub terminal: bool,
    pub sigma: SigmaWitness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    /// A level came out empty.
    Complete,
    /// The class bound stopped the search with live nodes left.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub target: TargetSpec,
    pub pruning: bool,
    pub status: Status,
    /// Nodes grouped by p-class, in creation order.
    pub levels: Vec<Vec<Node>>,
    pub survivors: Vec<Survivor>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.levels.iter().flatten()
    }

    pub fn node(&self, id: usize) -> &Node {
        self.nodes().find(|n| n.id == id).expect("node ids are dense")
    }

    /// `(class, number of nodes)` for each nonempty level.
    pub fn level_counts(&self) -> Vec<(u32, usize)> {
        self.levels.iter().filter(|l| !l.is_empty()).map(|l| (l[0].class, l.len())).collect()
    }

    /// Number of nodes at `class` that passed every rule before `rule`.
    pub fn reaching(&self, class: u32, rule: Rule) -> usize {
        self.nodes()
            .filter(|n| n.class == class && n.pruned_by().map_or(true, |r| r >= rule))
            .count()
    }

    pub fn children(&self, id: usize) -> &[usize] {
        match &self.node(id).verdict {
            Verdict::Expanded { children } => children,
            _ => &[],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// With pruning off every node is expanded up to the class bound, and
    /// verdicts only record whether the node is terminal.
    pub pruning: bool,
    pub max_class: Option<u32>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { pruning: true, max_class: None }
    }
}

/// Everything about a node needed while its level is live.
struct Live {
    node: Node,
    group: Group,
    summary: TransferSummary,
    cover: Option<PCover>,
    sigma: Option<SigmaWitness>,
}

pub fn run_search(target: &TargetSpec) -> Result<SearchReport, SearchError> {
    run_search_with(target, SearchOptions::default())
}

pub fn run_search_with(target: &TargetSpec, options: SearchOptions) -> Result<SearchReport, SearchError> {
    target.validate()?;
    let start = Instant::now();
    let max_class = options.max_class.unwrap_or(target.max_class);
    let root = PcPresentation::elementary_abelian(target.p, target.gab.rank()).map_err(GroupError::from)?;
    let mut next_id = 1;
    let mut current = vec![evaluate(1, None, None, root, target, options.pruning)?];
    let mut levels = Vec::new();
    let mut survivors = Vec::new();
    let mut status = Status::Complete;
    loop {
        let class = current[0].node.class;
        check_count(target, class, current.len())?;
        let expand: Vec<bool> = current.iter().map(|l| is_open(l, options.pruning)).collect();
        let last = class >= max_class;
        // Expand the open nodes of this level and evaluate their children.
        let children: Vec<Vec<Live>> = current
            .par_iter_mut()
            .zip(&expand)
            .map(|(live, &open)| -> Result<Vec<Live>, SearchError> {
                if !open || last {
                    return Ok(Vec::new());
                }
                let cover = match live.cover.take() {
                    Some(c) => c,
                    None => p_cover(live.group.presentation())?,
                };
                let set = descendants_of_cover(cover)?;
                set.descendants
                    .into_par_iter()
                    .map(|d| {
                        evaluate(class + 1, Some(live), Some(d.subspace), d.presentation, target, options.pruning)
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for ((live, open), kids) in current.iter_mut().zip(&expand).zip(children) {
            if !open {
                // Verdict already recorded.
            } else if last && live.node.nucleus_rank != Some(0) {
                live.node.verdict = Verdict::Unexplored;
                status = Status::Inconclusive;
            } else if kids.is_empty() {
                live.node.verdict = Verdict::Terminal;
            } else {
                let mut ids = Vec::new();
                for mut kid in kids {
                    kid.node.id = next_id;
                    kid.node.parent = Some(live.node.id);
                    ids.push(next_id);
                    next_id += 1;
                    next.push(kid);
                }
                live.node.verdict = Verdict::Expanded { children: ids };
            }
        }
        for kid in &next {
            let parent = current.iter().find(|l| Some(l.node.id) == kid.node.parent).unwrap();
            assert_kernels(parent, kid)?;
        }
        for live in &current {
            if live.node.matches_target {
                survivors.push(Survivor {
                    node: live.node.id,
                    terminal: live.node.verdict == Verdict::Terminal,
                    sigma: live.sigma.clone().expect("σ is checked before a node can match"),
                });
            }
        }
        levels.push(current.into_iter().map(|l| l.node).collect::<Vec<_>>());
        if next.is_empty() {
            break;
        }
        current = next;
    }
    Ok(SearchReport {
        target: target.clone(),
        pruning: options.pruning,
        status,
        levels,
        survivors,
        elapsed: start.elapsed(),
    })
}

fn check_count(target: &TargetSpec, class: u32, found: usize) -> Result<(), SearchError> {
    match target.expected_level_counts.iter().find(|(c, _)| *c == class) {
        Some(&(_, expected)) if expected != found => Err(SearchError::CountMismatch { class, expected, found }),
        _ => Ok(()),
    }
}

fn is_open(live: &Live, pruning: bool) -> bool {
    !pruning || !matches!(live.node.verdict, Verdict::Pruned(_))
}

/// Transfer kernels can only shrink along an edge where the abelianization
/// does not grow.
fn assert_kernels(parent: &Live, child: &Live) -> Result<(), SearchError> {
    match kernels_descend(&child.group, &child.summary, &parent.group, &parent.summary) {
        Some(false) => Err(SearchError::KernelContainment { parent: parent.node.id, child: child.node.id }),
        _ => Ok(()),
    }
}

/// Computes the invariants of a node and applies the rules in order. The
/// verdict is left as `Unexplored` unless a rule fires.
fn evaluate(
    class: u32,
    parent: Option<&Live>,
    subspace: Option<usize>,
    pres: PcPresentation,
    target: &TargetSpec,
    pruning: bool,
) -> Result<Live, SearchError> {
    let group = Group::new(&pres)?;
    let summary = transfer_summary(&group);
    let ab = abelianization(&pres);
    let node = Node {
        id: 0,
        class,
        parent: parent.map(|p| p.node.id),
        subspace,
        presentation: render_presentation(&pres),
        order: u64::from(pres.p()).pow(pres.ngens() as u32),
        fingerprint: fingerprint(&group)?,
        abelianization: ab.clone(),
        ttt: summary.ttt.clone(),
        tkt: summary.tkt.clone(),
        sigma: None,
        multiplicator_rank: None,
        nucleus_rank: None,
        verdict: Verdict::Unexplored,
        matches_target: false,
    };
    let mut live = Live { node, group, summary, cover: None, sigma: None };
    let verdict = apply_rules(&mut live, parent, target)?;
    live.node.matches_target = verdict.is_none() && final_checks(&live, target);
    match verdict {
        Some(p) if pruning => live.node.verdict = Verdict::Pruned(p),
        _ => {}
    }
    if !pruning && live.cover.is_none() {
        // Unpruned runs still need covers to know what to expand.
        let cover = p_cover(live.group.presentation())?;
        live.node.multiplicator_rank = Some(cover.multiplicator_rank());
        live.node.nucleus_rank = Some(cover.nucleus_rank());
        live.cover = Some(cover);
    }
    Ok(live)
}

fn apply_rules(live: &mut Live, parent: Option<&Live>, target: &TargetSpec) -> Result<Option<Pruned>, SearchError> {
    if let Some(p) = gab_rule(&live.node.abelianization, target)? {
        return Ok(Some(p));
    }
    if let Some(p) = ttt_rule(&live.summary.ttt, target)? {
        return Ok(Some(p));
    }
    live.sigma = find_sigma(&live.group)?;
    live.node.sigma = Some(live.sigma.is_some());
    if let Some(w) = &live.sigma {
        if !w.verified {
            return Err(GroupError::Internal(format!("σ-witness for node at class {} failed to verify", live.node.class)).into());
        }
    } else {
        return Ok(Some(Pruned::P3));
    }
    let cover = p_cover(live.group.presentation())?;
    live.node.multiplicator_rank = Some(cover.multiplicator_rank());
    live.node.nucleus_rank = Some(cover.nucleus_rank());
    let rank = rank_rule(&cover, target);
    live.cover = Some(cover);
    if rank.is_some() {
        return Ok(rank);
    }
    if let Some(p) = tkt_rule(live.summary.tkt.as_ref(), target) {
        return Ok(Some(p));
    }
    Ok(parent.and_then(|q| stable_ttt_rule(&live.summary.ttt, &q.summary.ttt, target)))
}

/// The node itself has the target invariants.
fn final_checks(live: &Live, target: &TargetSpec) -> bool {
    let tkt_ok = match (&target.tkt, &live.summary.tkt) {
        (None, _) => true,
        (Some(t), Some(k)) => tkt_equivalent(k, t),
        (Some(_), None) => false,
    };
    live.node.abelianization == target.gab
        && live.summary.ttt.multiset() == target.ttt_multiset()
        && tkt_ok
        && live.node.multiplicator_rank == Some(target.relation_rank)
        && live.sigma.is_some()
}

/// Properties of the final groups checked independently of the search.
#[derive(Clone, Debug, Serialize)]
pub struct SurvivorCheck {
    pub node: usize,
    pub terminal: bool,
    pub order: u64,
    pub p_class: u32,
    pub derived_length: usize,
    pub multiplicator_rank: usize,
    /// Index into the reference presentations of an isomorphic group.
    pub matches_reference: Option<usize>,
    pub witness_verified: bool,
    /// Orders of the class quotients, each isomorphic to the search node
    /// on the path to the survivor.
    pub quotient_orders: Vec<u64>,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("survivor {node}: {what}")]
    Failed { node: usize, what: String },
}

/// Rechecks every survivor: terminal, pairwise non-isomorphic, isomorphic
/// to one of `references`, and with class quotients isomorphic to the
/// ancestors found by the search.
pub fn verify_survivors(report: &SearchReport, references: &[PcPresentation]) -> Result<Vec<SurvivorCheck>, VerifyError> {
    let mut out = Vec::new();
    let pres: Vec<PcPresentation> = report.survivors.iter().map(|s| report.node(s.node).presentation()).collect();
    for (a, s) in report.survivors.iter().enumerate() {
        let fail = |what: String| VerifyError::Failed { node: s.node, what };
        let p = &pres[a];
        let g = Group::new(p)?;
        let cover = p_cover(p)?;
        if cover.nucleus_rank() != 0 {
            return Err(fail("not terminal".into()));
        }
        for b in 0..a {
            if crate::pga::is_isomorphic(p, &pres[b])?.is_some() {
                return Err(fail(format!("isomorphic to survivor {}", report.survivors[b].node)));
            }
        }
        let mut matches_reference = None;
        let mut witness_verified = false;
        for (k, r) in references.iter().enumerate() {
            if let Some(w) = crate::pga::is_isomorphic(p, r)? {
                witness_verified = crate::homsearch::verify_isomorphism(p, r, &w)?;
                matches_reference = Some(k);
                break;
            }
        }
        if matches_reference.is_none() || !witness_verified {
            return Err(fail("not isomorphic to any reference presentation".into()));
        }
        let mut quotient_orders = Vec::new();
        let mut id = report.node(s.node).parent;
        while let Some(anc) = id {
            let node = report.node(anc);
            let q = p.class_quotient(node.class);
            if crate::pga::is_isomorphic(&q, &node.presentation())?.is_none() {
                return Err(fail(format!("class-{} quotient differs from node {anc}", node.class)));
            }
            quotient_orders.push(node.order);
            id = node.parent;
        }
        quotient_orders.reverse();
        out.push(SurvivorCheck {
            node: s.node,
            terminal: true,
            order: report.node(s.node).order,
            p_class: p.p_class(),
            derived_length: derived_length(&g),
            multiplicator_rank: cover.multiplicator_rank(),
            matches_reference,
            witness_verified,
            quotient_orders,
        });
    }
    Ok(out)
}
