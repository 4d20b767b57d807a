//! Line-by-line comparison of a search over the bundled `Q(sqrt(-9748))`
//! target with the known shape of its descendant tree.

use std::fmt;

use serde::Serialize;

use crate::abelian::AbelianInvariants;
use crate::fixtures;
use crate::pga::immediate_descendants;
use crate::search::{stable_ttt_rule, verify_survivors, Node, Rule, SearchError, SearchReport, Verdict};
use crate::table::Group;
use crate::transfer::{tkt_equivalent, transfer_summary, Tkt, Ttt};

#[derive(Clone, Debug, Serialize)]
pub struct AuditLine {
    pub label: String,
    pub expected: String,
    pub found: String,
}

impl AuditLine {
    pub fn ok(&self) -> bool {
        self.expected == self.found
    }
}

impl fmt::Display for AuditLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.ok() { "ok  " } else { "FAIL" };
        write!(f, "{mark} {}: expected {}, found {}", self.label, self.expected, self.found)
    }
}

fn line(out: &mut Vec<AuditLine>, label: &str, expected: impl ToString, found: impl ToString) {
    out.push(AuditLine { label: label.into(), expected: expected.to_string(), found: found.to_string() });
}

fn ttt_of(node: &Node) -> Vec<AbelianInvariants> {
    node.ttt.multiset()
}

fn ab(v: &[u64]) -> AbelianInvariants {
    AbelianInvariants::new(v.to_vec())
}

/// Compares `report` with the expected tree. Nodes pruned before expansion
/// are expanded here where the expected counts talk about their children.
pub fn tower_audit(report: &SearchReport) -> Result<Vec<AuditLine>, SearchError> {
    let mut out = Vec::new();
    let at = |c: u32| report.nodes().filter(move |n| n.class == c);
    let count = |c: u32, rule: Rule| report.reaching(c, rule);
    let pruned_by = |c: u32, rule: Rule| at(c).filter(|n| n.pruned_by() == Some(rule)).count();
    let expanded = |c: u32| at(c).filter(|n| matches!(n.verdict, Verdict::Expanded { .. })).collect::<Vec<_>>();

    line(&mut out, "immediate descendants of [3,3]", 7, at(2).count());
    line(&mut out, "class 2 with abelianization [3,3]", 2, count(2, Rule::P2));
    line(&mut out, "class 2 with a σ-automorphism", 1, count(2, Rule::P4));
    line(&mut out, "immediate descendants of G_2", 11, at(3).count());
    line(&mut out, "class 3 passing the transfer target test", 5, count(3, Rule::P3));
    line(&mut out, "class 3 within the relation rank bound", 2, count(3, Rule::P5));
    let bound: Vec<&Node> = at(3).filter(|n| n.pruned_by().map_or(true, |r| r >= Rule::P5)).collect();
    let all_39 = vec![ab(&[3, 9]); 4];
    line(
        &mut out,
        "of those, with transfer targets [3,9]^4",
        bound.len(),
        bound.iter().filter(|n| ttt_of(n) == all_39).count(),
    );
    // The branch whose descendants keep the parent's transfer targets.
    let mut stuck = Vec::new();
    for n in &bound {
        let kids = immediate_descendants(&n.presentation())?.descendants;
        let frozen = kids
            .iter()
            .map(|d| Ok(transfer_summary(&Group::new(&d.presentation)?).ttt))
            .collect::<Result<Vec<Ttt>, SearchError>>()?
            .iter()
            .all(|t| stable_ttt_rule(t, &n.ttt, &report.target).is_some());
        if frozen && !kids.is_empty() {
            stuck.push(kids.len());
        }
    }
    line(&mut out, "class 3 branches with frozen transfer targets", 1, stuck.len());
    line(&mut out, "descendants in the frozen branch", "[2]", format!("{stuck:?}"));
    let g3 = expanded(3);
    line(&mut out, "expanded class 3 nodes", 1, g3.len());
    line(&mut out, "immediate descendants of G_3", 4, g3.first().map_or(0, |n| report.children(n.id).len()));
    line(&mut out, "class 4 with a σ-automorphism", 1, count(4, Rule::P4));
    let g4 = expanded(4);
    line(&mut out, "expanded class 4 nodes", 1, g4.len());
    line(&mut out, "immediate descendants of G_4", 14, g4.first().map_or(0, |n| report.children(n.id).len()));
    line(&mut out, "class 5 with a σ-automorphism", 14, at(5).filter(|n| n.sigma == Some(true)).count());
    line(&mut out, "class 5 within the relation rank bound", 6, count(5, Rule::P5));
    let target_ttt = sorted(report.target.ttt.clone());
    let six: Vec<&Node> = at(5).filter(|n| n.pruned_by().map_or(true, |r| r >= Rule::P5)).collect();
    line(
        &mut out,
        "of those, order 3^8 with the target transfer targets",
        6,
        six.iter().filter(|n| n.order == 6561 && ttt_of(n) == target_ttt).count(),
    );
    line(&mut out, "class 5 pruned by the kernel type", 3, pruned_by(5, Rule::P5));
    let kappa = |n: &&Node, t: &str| {
        let t: Tkt = t.parse().expect("valid kernel type");
        n.pruned_by().is_none() && n.tkt.as_ref().is_some_and(|k| tkt_equivalent(k, &t))
    };
    line(&mut out, "class 5 with kernel type ~ (1,4,3,1)", 2, six.iter().filter(|n| kappa(n, "(1,4,3,1)")).count());
    let odd: Vec<&&Node> = six.iter().filter(|n| kappa(n, "(0,2,3,1)")).collect();
    line(&mut out, "class 5 with kernel type ~ (0,2,3,1)", 1, odd.len());
    if let Some(n) = odd.first() {
        let kids: Vec<&Node> = report.children(n.id).iter().map(|&k| report.node(k)).collect();
        line(&mut out, "its immediate descendants", 4, kids.len());
        let wide = vec![ab(&[3, 9]), ab(&[3, 9]), ab(&[3, 9]), ab(&[27, 27])];
        line(
            &mut out,
            "of those, with targets [3,9]^3 [27,27] pruned by the target test",
            kids.len(),
            kids.iter().filter(|k| ttt_of(k) == wide && k.pruned_by() == Some(Rule::P2)).count(),
        );
    }
    line(&mut out, "search status", "COMPLETE", format!("{:?}", report.status).to_uppercase());
    line(&mut out, "survivors", 2, report.survivors.len());
    let references = [fixtures::load(fixtures::G5A), fixtures::load(fixtures::G5B)];
    match verify_survivors(report, &references) {
        Ok(checks) => {
            let refs: Vec<_> = checks.iter().map(|c| c.matches_reference).collect();
            line(&mut out, "survivors matched to g5a, g5b", "[Some(0), Some(1)]", format!("{:?}", sorted(refs)));
            for c in &checks {
                let label = format!("survivor {}: order, class, derived length, multiplicator", c.node);
                line(
                    &mut out,
                    &label,
                    "(6561, 5, 3, 2)",
                    format!("({}, {}, {}, {})", c.order, c.p_class, c.derived_length, c.multiplicator_rank),
                );
                line(&mut out, &format!("survivor {}: quotient orders", c.node), "[9, 27, 243, 729]", format!("{:?}", c.quotient_orders));
            }
        }
        Err(e) => line(&mut out, "survivor verification", "passes", e),
    }
    Ok(out)
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}
