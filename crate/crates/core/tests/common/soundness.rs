//! Walks the unpruned descendant tree and checks that each pruning rule
//! only looks at invariants that every descendant inherits. If they are,
//! nothing below a pruned node can have the target invariants. The walk
//! also collects every node that has them, for comparison with a pruned
//! search.

use pgroup_core::format::render_presentation;
use pgroup_core::pga::{immediate_descendants, is_isomorphic, p_cover};
use pgroup_core::search::{gab_rule, run_search_with, SearchOptions, TargetSpec};
use pgroup_core::sigma::find_sigma;
use pgroup_core::transfer::{tkt_equivalent, transfer_summary, Tkt, TktLabel};
use pgroup_core::{abelianization, is_quotient, AbelianInvariants, Group, GroupError, PcPresentation};

struct Info {
    pres: PcPresentation,
    class: u32,
    ab: AbelianInvariants,
    ttt: Vec<AbelianInvariants>,
    ttt_multiset: Vec<AbelianInvariants>,
    tkt: Option<Tkt>,
    sigma: bool,
    multiplicator: usize,
    /// Multiplicator minus nucleus rank of each ancestor and the node itself.
    gaps: Vec<usize>,
}

fn info(pres: PcPresentation, class: u32, mut gaps: Vec<usize>) -> Result<Info, GroupError> {
    let g = Group::new(&pres)?;
    let summary = transfer_summary(&g);
    let cover = p_cover(&pres)?;
    gaps.push(cover.multiplicator_rank() - cover.nucleus_rank());
    Ok(Info {
        class,
        ab: abelianization(&pres),
        ttt: summary.ttt.components().to_vec(),
        ttt_multiset: summary.ttt.multiset(),
        tkt: summary.tkt,
        sigma: find_sigma(&g)?.is_some(),
        multiplicator: cover.multiplicator_rank(),
        gaps,
        pres,
    })
}

impl Info {
    fn matches(&self, target: &TargetSpec) -> bool {
        let tkt_ok = match (&target.tkt, &self.tkt) {
            (None, _) => true,
            (Some(t), Some(k)) => tkt_equivalent(k, t),
            (Some(_), None) => false,
        };
        self.ab == target.gab
            && self.ttt_multiset == target.ttt_multiset()
            && tkt_ok
            && self.multiplicator == target.relation_rank
            && self.sigma
    }
}

#[derive(Debug, Default)]
pub struct Walk {
    pub nodes: usize,
    pub edges: usize,
    /// Nodes with all the target invariants.
    pub matches: Vec<PcPresentation>,
    /// Nodes whose descendants exceed the table budget; all of them are
    /// excluded by the abelianization alone.
    pub skipped: usize,
}

fn check_edge(parent: &Info, child: &Info) -> Result<(), String> {
    let q = |a: &AbelianInvariants, b: &AbelianInvariants| is_quotient(a, b).map_err(|e| e.to_string());
    if !q(&child.ab, &parent.ab)? {
        return Err(format!("abelianization {} does not map onto {}", child.ab, parent.ab));
    }
    if child.ttt.len() != parent.ttt.len() {
        return Err("different numbers of maximal subgroups".into());
    }
    for (c, p) in child.ttt.iter().zip(&parent.ttt) {
        if !q(c, p)? {
            return Err(format!("maximal subgroup abelianization {c} does not map onto {p}"));
        }
    }
    if child.sigma && !parent.sigma {
        return Err("σ-automorphism appears below a node without one".into());
    }
    if child.ab == parent.ab {
        if let (Some(c), Some(p)) = (&child.tkt, &parent.tkt) {
            for (x, y) in c.labels().iter().zip(p.labels()) {
                let ok = match x {
                    TktLabel::Trivial => true,
                    TktLabel::Full => *y == TktLabel::Full,
                    TktLabel::Line(_) => y == x || *y == TktLabel::Full,
                };
                if !ok {
                    return Err(format!("kernel type {c} does not shrink from {p}"));
                }
            }
        }
    }
    if let Some(g) = parent.gaps.iter().find(|&&g| child.multiplicator < g) {
        return Err(format!("multiplicator rank {} below ancestor gap {g}", child.multiplicator));
    }
    Ok(())
}

/// Checks every edge of the full tree down to class `max_class`, rooted at
/// the elementary abelian group of the target rank.
pub fn check_rule_inheritance(target: &TargetSpec, max_class: u32) -> Result<Walk, String> {
    let root = PcPresentation::elementary_abelian(target.p, target.gab.rank()).map_err(|e| e.to_string())?;
    let mut walk = Walk::default();
    let mut current = vec![info(root, 1, Vec::new()).map_err(|e| e.to_string())?];
    loop {
        for n in &current {
            walk.nodes += 1;
            if n.matches(target) {
                walk.matches.push(n.pres.clone());
            }
        }
        if current[0].class >= max_class {
            break;
        }
        let mut next = Vec::new();
        for parent in &current {
            let set = match immediate_descendants(&parent.pres) {
                Err(GroupError::BudgetExceeded { .. }) => {
                    if gab_rule(&parent.ab, target).map_err(|e| e.to_string())?.is_none() {
                        return Err(format!("node with abelianization {} is over budget", parent.ab));
                    }
                    walk.skipped += 1;
                    continue;
                }
                other => other.map_err(|e| e.to_string())?,
            };
            for d in set.descendants {
                let child = info(d.presentation, parent.class + 1, parent.gaps.clone()).map_err(|e| e.to_string())?;
                check_edge(parent, &child)?;
                walk.edges += 1;
                next.push(child);
            }
        }
        if next.is_empty() {
            break;
        }
        current = next;
    }
    Ok(walk)
}

/// Runs the walk and a pruned search to the same class, and checks that
/// every node of the walk with the target invariants is isomorphic to a
/// node the pruned search accepted. Returns the walk.
pub fn pruned_search_misses_nothing(target: &TargetSpec, max_class: u32) -> Result<Walk, String> {
    let walk = check_rule_inheritance(target, max_class)?;
    let options = SearchOptions { pruning: true, max_class: Some(max_class) };
    let report = run_search_with(target, options).map_err(|e| e.to_string())?;
    let found: Vec<PcPresentation> = report.nodes().filter(|n| n.matches_target).map(|n| n.presentation()).collect();
    for m in &walk.matches {
        let mut hit = false;
        for f in &found {
            if is_isomorphic(f, m).map_err(|e| e.to_string())?.is_some() {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(format!("pruned search missed\n{}", render_presentation(m)));
        }
    }
    if found.len() != walk.matches.len() {
        return Err(format!("pruned search accepted {} nodes, the walk {}", found.len(), walk.matches.len()));
    }
    Ok(walk)
}

/// A target with the invariants of the first node at `class` that the
/// pruned search for `target` expanded.
pub fn target_at(target: &TargetSpec, class: u32) -> Result<TargetSpec, String> {
    let report = run_search_with(target, SearchOptions { pruning: true, max_class: Some(class) }).map_err(|e| e.to_string())?;
    let node = report
        .nodes()
        .find(|n| n.class == class && n.pruned_by().is_none())
        .ok_or_else(|| format!("no open node at class {class}"))?;
    Ok(TargetSpec {
        ttt: node.ttt.multiset(),
        tkt: node.tkt.clone(),
        relation_rank: node.multiplicator_rank.ok_or("no multiplicator rank")?,
        max_class: class,
        expected_level_counts: Vec::new(),
        ..target.clone()
    })
}
