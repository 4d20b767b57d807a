//! Checks shared by the test suites and the acceptance run. Each returns
//! the first disagreement with its oracle.

use pgroup_core::abelian::{is_quotient, smith_normal_form, AbelianInvariants};
use pgroup_core::fixtures;
use pgroup_core::homsearch::{find_isomorphism, verify_isomorphism};
use pgroup_core::pga::{immediate_descendants, quotient_by};
use pgroup_core::structure::{maximal_subgroups, Subgroup};
use pgroup_core::transfer::{transfer_map, transfer_map_with};
use pgroup_core::{Group, PcPresentation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{agrees_with_coset_enumeration, embeds, partitions, two_generator_groups, Abelian};

/// Exponent lists of all abelian 3-groups of order at most 3^6.
pub fn small_abelian_groups() -> Vec<Vec<u32>> {
    (0..=6).flat_map(partitions).collect()
}

pub fn moduli(parts: &[u32]) -> Vec<u64> {
    parts.iter().map(|&k| 3u64.pow(k)).collect()
}

/// Relation matrix `diag(moduli)` mixed by random unimodular row and column
/// operations.
fn scrambled(m: &[u64], rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let n = m.len().max(1);
    let mut a = vec![vec![0i64; n]; n];
    for (i, &x) in m.iter().enumerate() {
        a[i][i] = x as i64;
    }
    if m.is_empty() {
        a[0][0] = 1;
    }
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let f = rng.gen_range(-2..=2);
        if rng.gen_bool(0.5) {
            for c in 0..n {
                a[i][c] += f * a[j][c];
            }
        } else {
            for r in a.iter_mut() {
                r[i] += f * r[j];
            }
        }
    }
    a
}

pub fn smith_normal_form_recovers_every_group() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for parts in small_abelian_groups() {
        let m = moduli(&parts);
        for _ in 0..5 {
            let d = smith_normal_form(&scrambled(&m, &mut rng));
            let d: Vec<u64> = d.iter().map(|x| u64::try_from(x.clone()).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
            if !d.windows(2).all(|w| w[0] == 0 || w[1] % w[0] == 0) {
                return Err(format!("{d:?} is not a divisor chain"));
            }
            if AbelianInvariants::new(d.clone()) != AbelianInvariants::new(m.clone()) {
                return Err(format!("{d:?} for moduli {m:?}"));
            }
        }
    }
    Ok(())
}

pub fn is_quotient_matches_embeddings() -> Result<(), String> {
    let groups = small_abelian_groups();
    let tables: Vec<Abelian> = groups.iter().map(|p| Abelian::new(moduli(p))).collect();
    for (a, ta) in groups.iter().zip(&tables) {
        let ia = AbelianInvariants::new(moduli(a));
        for b in &groups {
            let ib = AbelianInvariants::new(moduli(b));
            if is_quotient(&ia, &ib).map_err(|e| e.to_string())? != embeds(&moduli(b), ta) {
                return Err(format!("{ia} -> {ib}"));
            }
        }
    }
    Ok(())
}

pub fn is_quotient_is_a_partial_order() -> Result<(), String> {
    let inv: Vec<AbelianInvariants> = small_abelian_groups().iter().map(|p| AbelianInvariants::new(moduli(p))).collect();
    let q = |a: &AbelianInvariants, b: &AbelianInvariants| is_quotient(a, b).unwrap();
    for a in &inv {
        if !q(a, a) {
            return Err(format!("{a} is not a quotient of itself"));
        }
        for b in &inv {
            if a != b && q(a, b) && q(b, a) {
                return Err(format!("{a} and {b}"));
            }
            for c in &inv {
                if q(a, b) && q(b, c) && !q(a, c) {
                    return Err(format!("{a} -> {b} -> {c}"));
                }
            }
        }
    }
    Ok(())
}

/// The descendant tree up to order 3^5 and both final candidates.
pub fn collection_matches_coset_enumeration() -> Result<usize, String> {
    let mut groups = two_generator_groups(5);
    groups.push(fixtures::load(fixtures::G5A));
    groups.push(fixtures::load(fixtures::G5B));
    for g in &groups {
        agrees_with_coset_enumeration(g)
            .map_err(|e| format!("{e}\n{}", pgroup_core::format::render_presentation(g)))?;
    }
    Ok(groups.len())
}

/// A random left transversal: one random element from each coset `tM`, in
/// random order.
fn random_transversal(g: &Group, m: &Subgroup, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut covered = vec![false; g.order()];
    let mut out = Vec::new();
    for x in 0..g.order() as u32 {
        if covered[x as usize] {
            continue;
        }
        for &y in m.elements() {
            covered[g.mul(x, y) as usize] = true;
        }
        let y = m.elements()[rng.gen_range(0..m.order())];
        out.push(g.mul(x, y));
    }
    for i in (1..out.len()).rev() {
        out.swap(i, rng.gen_range(0..=i));
    }
    out
}

pub fn transfer_is_independent_of_the_transversal(groups: &[PcPresentation], rounds: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for pres in groups {
        let g = Group::new(pres).map_err(|e| e.to_string())?;
        for m in maximal_subgroups(&g) {
            let reference = transfer_map(&g, &m.subgroup);
            for _ in 0..rounds {
                let t = random_transversal(&g, &m.subgroup, &mut rng);
                if transfer_map_with(&g, &m.subgroup, &t).map_err(|e| e.to_string())? != reference {
                    return Err(format!("transversal {t:?} changes the transfer"));
                }
            }
        }
    }
    Ok(())
}

/// Merged quotients carry witnesses that check out again, and
/// representatives that were kept apart are really different. Returns the
/// numbers of descendants and merges.
pub fn deduplication_is_sound(pres: &PcPresentation) -> Result<(usize, usize), String> {
    let err = |e: pgroup_core::GroupError| e.to_string();
    let set = immediate_descendants(pres).map_err(err)?;
    for m in &set.merges {
        let quotient = quotient_by(&set.cover, &set.allowable[m.subspace]).map_err(err)?;
        let rep = &set.descendants[m.into];
        if !m.verified || !verify_isomorphism(&quotient, &rep.presentation, &m.witness).map_err(err)? {
            return Err(format!("merge of subspace {} into {} does not verify", m.subspace, m.into));
        }
    }
    for (a, da) in set.descendants.iter().enumerate() {
        for (b, db) in set.descendants[..a].iter().enumerate() {
            if da.fingerprint == db.fingerprint {
                let gb = Group::new(&db.presentation).map_err(err)?;
                if find_isomorphism(&da.presentation, &gb).map_err(err)?.is_some() {
                    return Err(format!("descendants {b} and {a} are isomorphic"));
                }
            }
        }
    }
    if set.descendants.len() + set.merges.len() != set.allowable.len() {
        return Err("some allowable subspace is neither kept nor merged".into());
    }
    Ok((set.descendants.len(), set.merges.len()))
}
