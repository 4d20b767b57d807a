//! End-to-end acceptance run for the bundled `Q(sqrt(-9748))` target. Prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{checks, soundness, two_generator_groups};
use pgroup_core::audit::tower_audit;
use pgroup_core::fixtures;
use pgroup_core::pga::immediate_descendants;
use pgroup_core::search::{run_search, verify_survivors, Node, SearchReport, TargetSpec, Verdict};
use pgroup_core::transfer::{kernels_descend, tkt_compatible, tkt_equivalent, transfer_summary, Tkt};
use pgroup_core::Group;

type Outcome = Result<String, String>;

fn expanded_at(report: &SearchReport, class: u32) -> Vec<&Node> {
    report.nodes().filter(|n| n.class == class && matches!(n.verdict, Verdict::Expanded { .. })).collect()
}

/// Immediate descendant counts along the chain G_1 -> G_4, recomputed from
/// the nodes the search expanded.
fn descendant_counts(report: &SearchReport, search_time: Duration) -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for class in 1..=4 {
        let open = expanded_at(report, class);
        let [g] = open.as_slice() else {
            return Err(format!("{} expanded nodes at class {class}", open.len()));
        };
        let set = immediate_descendants(&g.presentation()).map_err(|e| e.to_string())?;
        counts.push(set.descendants.len());
    }
    let total = search_time + start.elapsed();
    if counts != [7, 11, 4, 14] {
        return Err(format!("counts {counts:?}"));
    }
    if total > Duration::from_secs(600) {
        return Err(format!("took {total:?}"));
    }
    Ok(format!("counts {counts:?}, search and chain in {:.1}s", total.as_secs_f64()))
}

fn filter_counts(report: &SearchReport) -> Outcome {
    let lines = tower_audit(report).map_err(|e| e.to_string())?;
    let failed: Vec<String> = lines.iter().filter(|l| !l.ok()).map(ToString::to_string).collect();
    if failed.is_empty() {
        Ok(format!("{} audit lines agree", lines.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn final_verdict(report: &SearchReport) -> Outcome {
    let references = [fixtures::load(fixtures::G5A), fixtures::load(fixtures::G5B)];
    let checks = verify_survivors(report, &references).map_err(|e| e.to_string())?;
    if checks.len() != 2 {
        return Err(format!("{} survivors", checks.len()));
    }
    let mut refs: Vec<Option<usize>> = checks.iter().map(|c| c.matches_reference).collect();
    refs.sort();
    if refs != [Some(0), Some(1)] {
        return Err(format!("reference matches {refs:?}"));
    }
    for (c, s) in checks.iter().zip(&report.survivors) {
        let shape = (c.terminal, c.order, c.p_class, c.derived_length, c.multiplicator_rank);
        if shape != (true, 6561, 5, 3, 2) || !c.witness_verified || !s.sigma.verified {
            return Err(format!("survivor {}: {shape:?}", c.node));
        }
        if c.quotient_orders != [9, 27, 243, 729] {
            return Err(format!("survivor {}: quotient orders {:?}", c.node, c.quotient_orders));
        }
    }
    let ids: Vec<usize> = checks.iter().map(|c| c.node).collect();
    Ok(format!("survivors {ids:?} match g5a and g5b"))
}

fn kernel_types() -> Outcome {
    let k = |s: &str| s.parse::<Tkt>().map_err(|e| e.to_string());
    let results = [
        tkt_equivalent(&k("(1,4,3,1)")?, &k("(1,2,4,1)")?),
        tkt_equivalent(&k("(1,4,3,1)")?, &k("(4,2,3,2)")?),
        tkt_compatible(&k("(0,2,3,1)")?, &k("(1,4,3,1)")?),
    ];
    if results.iter().all(|&r| r) {
        Ok("equivalences and compatibility hold".into())
    } else {
        Err(format!("{results:?}"))
    }
}

/// Kernels of every child map into those of its parent, rechecked outside
/// the search.
fn kernel_containment(report: &SearchReport) -> Result<usize, String> {
    let mut edges = 0;
    for child in report.nodes() {
        let Some(pid) = child.parent else { continue };
        let parent = report.node(pid);
        let cg = Group::new(&child.presentation()).map_err(|e| e.to_string())?;
        let pg = Group::new(&parent.presentation()).map_err(|e| e.to_string())?;
        let (cs, ps) = (transfer_summary(&cg), transfer_summary(&pg));
        if kernels_descend(&cg, &cs, &pg, &ps) == Some(false) {
            return Err(format!("kernels of node {} do not descend from node {pid}", child.id));
        }
        edges += 1;
    }
    Ok(edges)
}

fn property_suites(report: &SearchReport) -> Outcome {
    let groups = checks::collection_matches_coset_enumeration()?;
    let mut transfer_groups = two_generator_groups(5);
    transfer_groups.push(fixtures::load(fixtures::G5A));
    transfer_groups.push(fixtures::load(fixtures::G5B));
    checks::transfer_is_independent_of_the_transversal(&transfer_groups, 20)?;
    let edges = kernel_containment(report)?;
    checks::smith_normal_form_recovers_every_group()?;
    checks::is_quotient_matches_embeddings()?;
    checks::is_quotient_is_a_partial_order()?;
    let mut merges = 0;
    for n in report.nodes().filter(|n| matches!(n.verdict, Verdict::Expanded { .. })) {
        merges += checks::deduplication_is_sound(&n.presentation())?.1;
    }
    Ok(format!(
        "{groups} groups match coset enumeration, {} with random transversals, {edges} edges, {merges} merges reverified",
        transfer_groups.len()
    ))
}

fn pruning_soundness(target: &TargetSpec) -> Outcome {
    let walk = soundness::pruned_search_misses_nothing(target, 3)?;
    let inner = soundness::target_at(target, 3)?;
    let inner_walk = soundness::pruned_search_misses_nothing(&inner, 3)?;
    if inner_walk.matches.is_empty() {
        return Err("the class-3 target has no matches".into());
    }
    Ok(format!(
        "{} unpruned nodes, {} over budget, {} matches; {} matches for a class-3 target",
        walk.nodes,
        walk.skipped,
        walk.matches.len(),
        inner_walk.matches.len()
    ))
}

fn report_line(n: usize, outcome: &Outcome) -> bool {
    match outcome {
        Ok(detail) => println!("criterion {n}: PASS ({detail})"),
        Err(reason) => println!("criterion {n}: FAIL ({reason})"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let target = TargetSpec::from_toml(fixtures::TARGET_9748).expect("bundled target parses");
    let start = Instant::now();
    let report = run_search(&target);
    let search_time = start.elapsed();
    let outcomes: Vec<Outcome> = match &report {
        Ok(r) => vec![
            descendant_counts(r, search_time),
            filter_counts(r),
            final_verdict(r),
            kernel_types(),
            property_suites(r),
            pruning_soundness(&target),
        ],
        Err(e) => {
            let failed = Err(format!("search failed: {e}"));
            vec![failed.clone(), failed.clone(), failed.clone(), kernel_types(), failed, pruning_soundness(&target)]
        }
    };
    let mut ok = true;
    for (k, o) in outcomes.iter().enumerate() {
        ok &= report_line(k + 1, o);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
