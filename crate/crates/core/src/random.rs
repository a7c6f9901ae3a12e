//! Seeded generators for test corpora: posets, graded categories over them,
//! subcartesian functors and covers.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fincat::{chain_cover, CatRef, FinCat, Functor, Obj};
use crate::mapgraded::{restrict, GradedCat, GradedFunctor};
use crate::scalar::Scalar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Poset on `p0, …, p{n−1}` generated by `pi ≤ pj` (`i < j`), each
/// relation kept with probability `density`.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinCat {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                rel.push((refs[i], refs[j]));
            }
        }
    }
    FinCat::poset(&refs, &rel).expect("relations go upward")
}

/// Linearization of a random poset lying over the poset `base`: one to
/// `max_fiber` objects over each base object, and `x ≤ y` over `u < v` kept
/// with probability `density` before closing up.
pub fn random_graded<F: Scalar, R: Rng>(rng: &mut R, base: &CatRef, max_fiber: usize, density: f64) -> GradedCat<F> {
    assert!(base.is_poset() && max_fiber >= 1);
    let mut names = Vec::new();
    let mut over = Vec::new();
    for u in base.object_ids() {
        for i in 0..rng.gen_range(1..=max_fiber) {
            names.push(format!("{}{}", base.obj_name(u), (b'a' + i as u8) as char));
            over.push(u);
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut rel = Vec::new();
    for x in 0..names.len() {
        for y in 0..names.len() {
            let (u, v) = (over[x], over[y]);
            if u != v && !base.hom(u, v).is_empty() && rng.gen_bool(density) {
                rel.push((refs[x], refs[y]));
            }
        }
    }
    let c: CatRef = Arc::new(FinCat::poset(&refs, &rel).expect("relations follow the base order"));
    let mor_map = c
        .morphism_ids()
        .map(|m| base.hom(over[c.src(m).0], over[c.tgt(m).0])[0])
        .collect();
    let p = Functor::new(c.clone(), base.clone(), over, mor_map).expect("projection onto the base");
    GradedCat::linearize(&p)
}

/// Restriction along a random functor into the base of `a`: the inclusion
/// of a full subcategory on a random set of objects, or a random weakly
/// increasing chain (which may repeat objects). The base must be a poset.
pub fn random_subcartesian<F: Scalar, R: Rng>(rng: &mut R, a: &Arc<GradedCat<F>>) -> GradedFunctor<F> {
    let u = &a.base;
    assert!(u.is_poset());
    let phi = if rng.gen_bool(0.5) {
        let mut objs: Vec<Obj> = u.object_ids().filter(|_| rng.gen_bool(0.6)).collect();
        if objs.is_empty() {
            objs.push(Obj(rng.gen_range(0..u.num_objects())));
        }
        let (sub, so, sm) = u.full_subcategory(&objs);
        Functor::from_sub(Arc::new(sub), u.clone(), so, sm)
    } else {
        let len = rng.gen_range(1..=3);
        let mut path = vec![Obj(rng.gen_range(0..u.num_objects()))];
        while path.len() < len {
            let last = *path.last().unwrap();
            let next: Vec<Obj> = u.out_mors(last).iter().map(|&m| u.tgt(m)).collect();
            path.push(*next.choose(rng).unwrap());
        }
        let v: CatRef = Arc::new(FinCat::chain(len - 1));
        let mor_map = v
            .morphism_ids()
            .map(|m| u.hom(path[v.src(m).0], path[v.tgt(m).0])[0])
            .collect();
        Functor::new(v, u.clone(), path, mor_map).expect("monotone chain")
    };
    restrict(a, &phi).1
}

/// Restrictions to the maximal chains of the base plus `extra` random full
/// subcategories; an ∞-cover whenever the base is a poset.
pub fn random_cover<F: Scalar, R: Rng>(rng: &mut R, a: &Arc<GradedCat<F>>, extra: usize) -> Vec<GradedFunctor<F>> {
    let cover = chain_cover(&a.base).expect("poset base");
    let mut legs: Vec<GradedFunctor<F>> = cover.chains.iter().map(|f| restrict(a, f).1).collect();
    let u = &a.base;
    for _ in 0..extra {
        let objs: Vec<Obj> = u.object_ids().filter(|_| rng.gen_bool(0.5)).collect();
        if objs.is_empty() {
            continue;
        }
        let (sub, so, sm) = u.full_subcategory(&objs);
        legs.push(restrict(a, &Functor::from_sub(Arc::new(sub), u.clone(), so, sm)).1);
    }
    legs.shuffle(rng);
    legs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_n_cover, CoverDegree};
    use crate::Q;

    #[test]
    fn generators_are_deterministic_and_valid() {
        for seed in 0..10 {
            let base: CatRef = Arc::new(random_poset(&mut rng(seed), 4, 0.5));
            let a1: GradedCat<Q> = random_graded(&mut rng(seed), &base, 2, 0.6);
            let a2: GradedCat<Q> = random_graded(&mut rng(seed), &base, 2, 0.6);
            assert!(a1.structurally_equal(&a2));
            let a = Arc::new(a1);
            let f = random_subcartesian(&mut rng(seed), &a);
            assert!(f.is_subcartesian());
            let legs = random_cover(&mut rng(seed), &a, 1);
            let sharps: Vec<_> = legs.iter().map(GradedFunctor::sharp_functor).collect();
            assert!(is_n_cover(a.sharp_cat(), &sharps, CoverDegree::Finite(3)).covered);
        }
    }
}
