//! Automorphisms of order 2 acting as inversion on the abelianization.

use serde::Serialize;

use crate::error::GroupError;
use crate::homsearch::HomSearch;
use crate::pcp::ExponentVector;
use crate::structure::{derived_subgroup, Subgroup};
use crate::table::Group;

/// Images of the weight-1 generators under a σ-automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaWitness {
    #[serde(serialize_with = "serialize_vectors")]
    pub images: Vec<ExponentVector>,
    pub verified: bool,
}

fn serialize_vectors<S: serde::Serializer>(v: &[ExponentVector], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.as_slice().to_vec()))
}

/// Applies the endomorphism given by images of all generators to `x`.
fn apply(g: &Group, all_images: &[u32], x: u32) -> u32 {
    let mut r = 0;
    for (k, &a) in g.digits(x).iter().enumerate() {
        for _ in 0..a {
            r = g.mul(r, all_images[k]);
        }
    }
    r
}

/// Searches for an automorphism `sigma` with `sigma^2 = 1` inducing
/// `x -> x^-1` on `G / G'`. The search is exhaustive over automorphisms
/// inducing inversion; such an `alpha` has order `2 p^t` and `alpha^{p^t}`
/// is the witness.
pub fn find_sigma(g: &Group) -> Result<Option<SigmaWitness>, GroupError> {
    let p = g.p();
    if p == 2 {
        return Err(GroupError::EvenPrime("inversion is trivial on 2-groups modulo squares"));
    }
    let pres = g.presentation();
    let d = pres.rank();
    let hs = HomSearch::new(pres, g)?;
    let derived = derived_subgroup(g, &Subgroup::whole(g));
    // G' = Phi(G) exactly when G^ab is elementary; then inversion modulo Phi
    // already is inversion on G^ab and the last layer can be chosen freely.
    let elementary = derived.order() * (p as usize).pow(d as u32) == g.order();
    let start: Vec<u32> = (0..d).map(|i| (p - 1) * g.place(i)).collect();
    let inverts = |imgs: &[u32]| (0..d).all(|i| derived.contains(g.mul(imgs[i], g.generator(i))));
    let Some(alpha) = hs.search([start], !elementary, &mut |imgs| elementary || inverts(imgs)) else {
        return Ok(None);
    };
    let alpha_all = hs.images(&alpha);
    // Order of alpha, tracked on the weight-1 generators.
    let identity: Vec<u32> = (0..d).map(|i| g.generator(i)).collect();
    let mut power = alpha.clone();
    let mut order = 1u64;
    while power != identity {
        power = power.iter().map(|&x| apply(g, &alpha_all, x)).collect();
        order += 1;
    }
    if order % 2 != 0 || (order / 2) % 2 == 0 {
        return Err(GroupError::Internal(format!(
            "automorphism inducing inversion has order {order}"
        )));
    }
    let mut sigma = identity.clone();
    for _ in 0..order / 2 {
        sigma = sigma.iter().map(|&x| apply(g, &alpha_all, x)).collect();
    }
    let verified = verify_sigma(g, &hs, &sigma, &derived);
    Ok(Some(SigmaWitness {
        images: sigma.iter().map(|&x| g.vector(x)).collect(),
        verified,
    }))
}

fn verify_sigma(g: &Group, hs: &HomSearch<'_>, sigma: &[u32], derived: &Subgroup) -> bool {
    let d = sigma.len();
    if !hs.is_homomorphism(sigma) {
        return false;
    }
    let frattini: Vec<Vec<u32>> = sigma
        .iter()
        .map(|&x| (0..d).map(|k| g.digit(x, k)).collect())
        .collect();
    if crate::linalg::rank(&frattini, g.p()) != d {
        return false;
    }
    let all = hs.images(sigma);
    let involution = (0..d).all(|i| apply(g, &all, sigma[i]) == g.generator(i));
    let inverts = (0..g.order() as u32).all(|x| derived.contains(g.mul(apply(g, &all, x), x)));
    involution && inverts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::{PcPresentation, PcRelations};

    #[test]
    fn abelian_groups_have_inversion() {
        let g = Group::new(&PcPresentation::elementary_abelian(3, 2).unwrap()).unwrap();
        let w = find_sigma(&g).unwrap().unwrap();
        assert!(w.verified);
        assert_eq!(w.images[0].as_slice(), &[2, 0]);
    }

    #[test]
    fn heisenberg_group_has_sigma() {
        let id = ExponentVector::identity(3);
        let mut comm = vec![id.clone(); 3];
        comm[0] = ExponentVector::from_vec(vec![0, 0, 1]);
        let pres = PcPresentation::new(PcRelations::new(3, 3, vec![id; 3], comm).unwrap()).unwrap();
        let w = find_sigma(&Group::new(&pres).unwrap()).unwrap().unwrap();
        assert!(w.verified);
    }

    #[test]
    fn cyclic_group_of_order_nine() {
        let mut pow = vec![ExponentVector::identity(2); 2];
        pow[0] = ExponentVector::from_vec(vec![0, 1]);
        let pres = PcPresentation::new(PcRelations::new(3, 2, pow, vec![ExponentVector::identity(2)]).unwrap()).unwrap();
        let w = find_sigma(&Group::new(&pres).unwrap()).unwrap().unwrap();
        assert!(w.verified);
        assert_eq!(w.images[0].as_slice(), &[2, 2]);
    }

    #[test]
    fn even_prime_is_rejected() {
        let g = Group::new(&PcPresentation::elementary_abelian(2, 2).unwrap()).unwrap();
        assert!(matches!(find_sigma(&g), Err(GroupError::EvenPrime(_))));
    }
}
