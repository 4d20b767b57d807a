//! The transfer does not depend on the transversal and is a homomorphism.

mod common;

use common::{checks, two_generator_groups};
use pgroup_core::fixtures;
use pgroup_core::structure::{derived_subgroup, maximal_subgroups, Subgroup};
use pgroup_core::transfer::{transfer_map, transfer_map_with, tkt_compatible, tkt_equivalent, Tkt};
use pgroup_core::{Group, PcPresentation};

fn groups() -> Vec<PcPresentation> {
    let mut out = two_generator_groups(5);
    out.push(fixtures::load(fixtures::G5A));
    out.push(fixtures::load(fixtures::G5B));
    out
}

#[test]
fn transfer_is_independent_of_the_transversal() {
    checks::transfer_is_independent_of_the_transversal(&groups(), 20).unwrap();
}

#[test]
fn transfer_is_a_homomorphism() {
    for pres in groups() {
        let g = Group::new(&pres).unwrap();
        let gd = derived_subgroup(&g, &Subgroup::whole(&g));
        for m in maximal_subgroups(&g) {
            let md = derived_subgroup(&g, &m.subgroup);
            let v = transfer_map(&g, &m.subgroup);
            let dom: Vec<u32> = v.domain.iter().map(|x| g.code(x)).collect();
            let val: Vec<u32> = v.values.iter().map(|x| g.code(x)).collect();
            let class_of = |x: u32| dom.iter().position(|&r| gd.contains(g.mul(g.inv(r), x))).unwrap();
            for a in 0..dom.len() {
                for b in 0..dom.len() {
                    let ab = class_of(g.mul(dom[a], dom[b]));
                    let prod = g.mul(val[a], val[b]);
                    assert!(md.contains(g.mul(g.inv(val[ab]), prod)));
                }
            }
        }
    }
}

#[test]
fn bad_transversals_are_rejected() {
    let g = Group::new(&fixtures::load(fixtures::HEISENBERG)).unwrap();
    let m = &maximal_subgroups(&g)[0].subgroup;
    let first = m.elements()[0];
    assert!(transfer_map_with(&g, m, &[first, first, first]).is_err());
    assert!(transfer_map_with(&g, m, &[first]).is_err());
}

#[test]
fn kernel_type_equivalence_examples() {
    let k = |s: &str| s.parse::<Tkt>().unwrap();
    assert!(tkt_equivalent(&k("(1,4,3,1)"), &k("(1,2,4,1)")));
    assert!(tkt_equivalent(&k("(1,4,3,1)"), &k("(4,2,3,2)")));
    assert!(tkt_compatible(&k("(0,2,3,1)"), &k("(1,4,3,1)")));
    assert!(!tkt_equivalent(&k("(0,2,3,1)"), &k("(1,4,3,1)")));
}
