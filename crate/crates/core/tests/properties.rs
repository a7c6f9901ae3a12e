use std::sync::Arc;

use mapgraded::fincat::{chain_cover, is_n_cover, nerve_count, CatRef, CoverDegree, FinCat, Functor};
use mapgraded::hochschild::{sheaf_check, Convention, HochschildComplex};
use mapgraded::mapgraded::{glue_descent, restrict, DescentDatum, GlueOptions, GradedCat, GradedFunctor};
use mapgraded::qlinalg::Matrix;
use mapgraded::random::{random_cover, random_graded, random_poset, random_subcartesian, rng};
use mapgraded::Q;
use proptest::prelude::*;

type G = GradedCat<Q>;

fn graded(seed: u64, objects: usize) -> Arc<G> {
    let mut r = rng(seed);
    let base: CatRef = Arc::new(random_poset(&mut r, objects, 0.6));
    Arc::new(random_graded(&mut r, &base, 2, 0.6))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn small_matrix() -> impl Strategy<Value = Matrix<Q>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            let rows: Vec<Vec<Q>> = v.chunks(c).map(|row| row.iter().map(|&x| Q::from_integer(x.into())).collect()).collect();
            Matrix::from_dense(r, c, &rows)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_is_transpose_invariant(m in small_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank() + m.nullity(), m.ncols());
        let k = m.kernel_basis();
        prop_assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn chain_nerves_count_monotone_sequences(k in 0usize..4, n in 0usize..5) {
        // N_n of 0 → 1 → … → k: weakly increasing sequences of length n + 1
        prop_assert_eq!(nerve_count(&FinCat::chain(k), n), binomial(n + k + 1, n + 1));
    }

    #[test]
    fn differentials_square_to_zero(seed in any::<u64>(), objects in 1usize..4) {
        let a = graded(seed, objects);
        for conv in [Convention::Standard, Convention::Flipped] {
            let c = HochschildComplex::plain(&a, 2, conv).unwrap();
            prop_assert_eq!(c.square_zero_failure(), None);
        }
    }

    #[test]
    fn cohomology_does_not_depend_on_the_convention(seed in any::<u64>(), objects in 1usize..4) {
        let a = graded(seed, objects);
        let std = HochschildComplex::plain(&a, 2, Convention::Standard).unwrap().hh();
        let flip = HochschildComplex::plain(&a, 2, Convention::Flipped).unwrap().hh();
        prop_assert_eq!(std, flip);
    }

    #[test]
    fn spec_round_trip_is_structural_identity(seed in any::<u64>(), objects in 1usize..5) {
        let a = graded(seed, objects);
        let back = G::from_spec(&a.base, &a.to_spec()).unwrap();
        prop_assert!(back.structurally_equal(&a));
    }

    #[test]
    fn restriction_along_the_identity_is_an_isomorphism(seed in any::<u64>(), objects in 1usize..5) {
        let a = graded(seed, objects);
        let (_, delta) = restrict(&a, &Functor::identity(&a.base));
        prop_assert!(delta.is_isomorphism());
    }

    #[test]
    fn random_restrictions_are_subcartesian(seed in any::<u64>(), objects in 1usize..5) {
        let a = graded(seed, objects);
        let delta = random_subcartesian(&mut rng(seed ^ 1), &a);
        prop_assert!(delta.is_subcartesian());
        prop_assert!(Arc::ptr_eq(&delta.target, &a));
    }

    #[test]
    fn chain_covers_cover_in_every_degree(seed in any::<u64>(), objects in 1usize..5) {
        let base: CatRef = Arc::new(random_poset(&mut rng(seed), objects, 0.5));
        let legs = chain_cover(&base).unwrap().chains;
        let v = is_n_cover(&base, &legs, CoverDegree::Finite(3));
        prop_assert!(v.covered, "unhit {:?}", v.witness);
    }

    #[test]
    fn random_covers_satisfy_the_sheaf_condition(seed in any::<u64>(), objects in 2usize..4) {
        let a = graded(seed, objects);
        let legs = random_cover(&mut rng(seed ^ 2), &a, 1);
        let r = sheaf_check(&a, &legs, 2, Convention::Standard).unwrap();
        prop_assert!(r.is_exact(), "{}", r);
    }

    #[test]
    fn restrictions_glue_back(seed in any::<u64>(), objects in 2usize..4) {
        let a = graded(seed, objects);
        let legs: Vec<Functor> = random_cover(&mut rng(seed ^ 3), &a, 1).iter().map(|f| f.base.clone()).collect();
        let (datum, deltas) = DescentDatum::from_global(&a, legs).unwrap();
        let glued = glue_descent(&datum, GlueOptions::default()).unwrap();
        prop_assert!(glued.comparison(&a, &deltas).unwrap().is_isomorphism());
        prop_assert!(glued.isos.iter().all(GradedFunctor::is_isomorphism));
    }
}
