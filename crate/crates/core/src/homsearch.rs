//! Backtracking search for homomorphisms from a presented group into a
//! materialized one, lifting generator images one lower exponent-p central
//! layer at a time.
//!
//! Whether the defining relations hold modulo `P_{L+1}` of the target only
//! depends on the generator images modulo `P_L`, so each layer is checked
//! before the next one is enumerated, and the last layer never needs
//! enumerating.

use std::collections::VecDeque;

use crate::error::GroupError;
use crate::pcp::{Definition, ExponentVector, PcPresentation, RelationId};
use crate::table::Group;

#[derive(Clone, Debug)]
enum Recipe {
    Generator,
    Power(usize),
    Comm(usize, usize),
    /// Product of weight-1 generators.
    Word(Vec<usize>),
}

pub(crate) struct HomSearch<'a> {
    src: &'a PcPresentation,
    dst: &'a Group,
    d: usize,
    recipes: Vec<Recipe>,
    /// `starts[L]` = number of target generators of weight at most `L`.
    starts: Vec<usize>,
    /// Source relations worth checking modulo `P_L` of the target.
    checks: Vec<Vec<RelationId>>,
    class: usize,
}

/// Shortest positive words in the weight-1 generators for every element.
fn generator_words(src: &PcPresentation) -> Result<Vec<Vec<usize>>, GroupError> {
    let g = Group::new(src)?;
    let d = src.rank();
    let mut parent: Vec<Option<(u32, usize)>> = vec![None; g.order()];
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for k in 0..d {
            let y = g.mul_gen(x, k);
            if !seen[y as usize] {
                seen[y as usize] = true;
                parent[y as usize] = Some((x, k));
                queue.push_back(y);
            }
        }
    }
    Ok((0..src.ngens())
        .map(|k| {
            let mut word = Vec::new();
            let mut x = g.generator(k);
            while let Some((prev, letter)) = parent[x as usize] {
                word.push(letter);
                x = prev;
            }
            word.reverse();
            word
        })
        .collect())
}

fn recipes(src: &PcPresentation) -> Result<Vec<Recipe>, GroupError> {
    let mut words = None;
    (0..src.ngens())
        .map(|k| {
            if src.weight(k) == 1 {
                return Ok(Recipe::Generator);
            }
            Ok(match src.definition(k) {
                Some(Definition::Power(a)) => Recipe::Power(a),
                Some(Definition::Commutator(j, i)) => Recipe::Comm(j, i),
                None => {
                    if words.is_none() {
                        words = Some(generator_words(src)?);
                    }
                    Recipe::Word(words.as_ref().unwrap()[k].clone())
                }
            })
        })
        .collect()
}

impl<'a> HomSearch<'a> {
    pub(crate) fn new(src: &'a PcPresentation, dst: &'a Group) -> Result<Self, GroupError> {
        if src.p() != dst.p() {
            return Err(GroupError::PrimeMismatch(src.p(), dst.p()));
        }
        let dpres = dst.presentation();
        let class = dpres.p_class() as usize;
        let starts: Vec<usize> = (0..=class).map(|l| dpres.gens_up_to_weight(l as u32)).collect();
        let mut checks = vec![Vec::new(); class + 1];
        for rel in src.relations().relation_ids() {
            let lhs_weight = match rel {
                RelationId::Power(i) => src.weight(i) + 1,
                RelationId::Commutator(j, i) => src.weight(j) + src.weight(i),
            } as usize;
            for (level, list) in checks.iter_mut().enumerate().skip(1) {
                if lhs_weight <= level || level == class {
                    list.push(rel);
                }
            }
        }
        Ok(HomSearch {
            src,
            dst,
            d: src.rank(),
            recipes: recipes(src)?,
            starts,
            checks,
            class,
        })
    }

    /// Images of all source generators given images of the weight-1 ones.
    pub(crate) fn images(&self, gens: &[u32]) -> Vec<u32> {
        let g = self.dst;
        let p = u64::from(g.p());
        let mut imgs = Vec::with_capacity(self.recipes.len());
        for (k, recipe) in self.recipes.iter().enumerate() {
            let x = match recipe {
                Recipe::Generator => gens[k],
                Recipe::Power(a) => g.pow(imgs[*a], p),
                Recipe::Comm(j, i) => g.comm(imgs[*j], imgs[*i]),
                Recipe::Word(w) => w.iter().fold(0, |acc, &l| g.mul(acc, gens[l])),
            };
            imgs.push(x);
        }
        imgs
    }

    fn relation_sides(&self, imgs: &[u32], rel: RelationId) -> (u32, u32) {
        let g = self.dst;
        let lhs = match rel {
            RelationId::Power(i) => g.pow(imgs[i], u64::from(g.p())),
            RelationId::Commutator(j, i) => g.comm(imgs[j], imgs[i]),
        };
        let mut rhs = 0;
        for (k, e) in self.src.relations().relation_rhs(rel).support() {
            rhs = g.mul(rhs, g.pow(imgs[k], u64::from(e)));
        }
        (lhs, rhs)
    }

    /// Whether the checked relations hold modulo `P_level` of the target.
    fn holds(&self, imgs: &[u32], level: usize) -> bool {
        let cut = self.starts[level];
        self.checks[level].iter().all(|&rel| {
            let (lhs, rhs) = self.relation_sides(imgs, rel);
            self.dst.truncate(lhs, cut) == self.dst.truncate(rhs, cut)
        })
    }

    /// Whether all source relations hold exactly.
    pub(crate) fn is_homomorphism(&self, gens: &[u32]) -> bool {
        let imgs = self.images(gens);
        self.src.relations().relation_ids().into_iter().all(|rel| {
            let (lhs, rhs) = self.relation_sides(&imgs, rel);
            lhs == rhs
        })
    }

    /// Depth-first search over lifts of each starting assignment (images of
    /// the weight-1 generators modulo `P_1`). `accept` sees the weight-1
    /// images of each homomorphism found and returns `true` to stop.
    ///
    /// With `enumerate_last` false only one lift of the final layer is
    /// offered per class of assignments modulo the last term.
    pub(crate) fn search(
        &self,
        starts: impl IntoIterator<Item = Vec<u32>>,
        enumerate_last: bool,
        accept: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Option<Vec<u32>> {
        for mut state in starts {
            debug_assert_eq!(state.len(), self.d);
            if self.dfs(1, &mut state, enumerate_last, accept) {
                return Some(state);
            }
        }
        None
    }

    fn dfs(
        &self,
        level: usize,
        state: &mut Vec<u32>,
        enumerate_last: bool,
        accept: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        let c = self.class;
        if level >= c {
            return self.holds(&self.images(state), c) && accept(state);
        }
        if !self.holds(&self.images(state), level + 1) {
            return false;
        }
        if level + 1 == c && !enumerate_last {
            return accept(state);
        }
        let (lo, hi) = (self.starts[level], self.starts[level + 1]);
        let width = hi - lo;
        let p = self.dst.p();
        let slots = width * self.d;
        let total = (p as u64).pow(slots as u32);
        let base = state.clone();
        for code in 0..total {
            let mut x = code;
            for (s, &b) in state.iter_mut().zip(&base) {
                let mut v = b;
                for k in lo..hi {
                    v += (x % u64::from(p)) as u32 * self.dst.place(k);
                    x /= u64::from(p);
                }
                *s = v;
            }
            if self.dfs(level + 1, state, enumerate_last, accept) {
                return true;
            }
        }
        state.copy_from_slice(&base);
        false
    }
}

/// Codes of the `d x d` invertible matrices over `F_p`, as images of the
/// weight-1 generators modulo the Frattini subgroup, in lexicographic order.
pub(crate) fn invertible_starts(g: &Group, d: usize) -> Vec<Vec<u32>> {
    let p = g.p();
    let total = (p as u64).pow((d * d) as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut m = vec![vec![0u32; d]; d];
        let mut x = code;
        for i in (0..d).rev() {
            for j in (0..d).rev() {
                m[i][j] = (x % u64::from(p)) as u32;
                x /= u64::from(p);
            }
        }
        if crate::linalg::rank(&m, p) == d {
            out.push(
                m.iter()
                    .map(|row| row.iter().enumerate().map(|(k, &a)| a * g.place(k)).sum())
                    .collect(),
            );
        }
    }
    out
}

/// Images of the weight-1 generators of `src` under an isomorphism onto
/// `dst`, if one exists. Exhaustive: `None` means the groups are not
/// isomorphic.
pub fn find_isomorphism(src: &PcPresentation, dst: &Group) -> Result<Option<Vec<ExponentVector>>, GroupError> {
    let dpres = dst.presentation();
    if src.p() != dst.p()
        || src.ngens() != dst.ngens()
        || src.rank() != dpres.rank()
        || src.weights() != dpres.weights()
    {
        return Ok(None);
    }
    let hs = HomSearch::new(src, dst)?;
    let found = hs.search(invertible_starts(dst, src.rank()), false, &mut |_| true);
    Ok(found.map(|imgs| imgs.iter().map(|&x| dst.vector(x)).collect()))
}

/// Independent check of an isomorphism witness by collection in the target
/// presentation: every relation of `src` holds for the images, the images
/// generate modulo the Frattini subgroup, and the orders agree.
pub fn verify_isomorphism(
    src: &PcPresentation,
    dst: &PcPresentation,
    images: &[ExponentVector],
) -> Result<bool, GroupError> {
    let d = src.rank();
    if images.len() != d || src.ngens() != dst.ngens() || src.p() != dst.p() || dst.rank() != d {
        return Ok(false);
    }
    let frattini: Vec<Vec<u32>> = images.iter().map(|v| v.as_slice()[..d].to_vec()).collect();
    if crate::linalg::rank(&frattini, src.p()) != d {
        return Ok(false);
    }
    verify_homomorphism(src, dst, images)
}

/// Checks every relation of `src` on the given images of its weight-1
/// generators, computing in `dst` by collection.
pub fn verify_homomorphism(
    src: &PcPresentation,
    dst: &PcPresentation,
    images: &[ExponentVector],
) -> Result<bool, GroupError> {
    let rels = dst.relations();
    let p = u64::from(src.p());
    let recipes = recipes(src)?;
    let mut imgs: Vec<ExponentVector> = Vec::with_capacity(src.ngens());
    for (k, recipe) in recipes.iter().enumerate() {
        let x = match recipe {
            Recipe::Generator => images[k].clone(),
            Recipe::Power(a) => rels.pow(&imgs[*a], p),
            Recipe::Comm(j, i) => rels.comm(&imgs[*j], &imgs[*i]),
            Recipe::Word(w) => w
                .iter()
                .fold(dst.identity(), |acc, &l| rels.mul(&acc, &images[l])),
        };
        imgs.push(x);
    }
    Ok(src.relations().relation_ids().into_iter().all(|rel| {
        let lhs = match rel {
            RelationId::Power(i) => rels.pow(&imgs[i], p),
            RelationId::Commutator(j, i) => rels.comm(&imgs[j], &imgs[i]),
        };
        let rhs = src
            .relations()
            .relation_rhs(rel)
            .support()
            .fold(dst.identity(), |acc, (k, e)| rels.mul(&acc, &rels.pow(&imgs[k], u64::from(e))));
        lhs == rhs
    }))
}
