use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::fincat::{arrow_cat_base, ArrowBase, Mor};
use crate::mapgraded::{FiberObj, GradedCat, GradedFunctor, RawGraded};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

use super::Bimodule;

/// `𝔟 →_M 𝔞` over `V →_S U` with the inclusions of both sides.
#[derive(Clone, Debug)]
pub struct ArrowCategory<F: Scalar> {
    pub cat: Arc<GradedCat<F>>,
    pub base: ArrowBase,
    pub incl_b: GradedFunctor<F>,
    pub incl_a: GradedFunctor<F>,
}

impl<F: Scalar> ArrowCategory<F> {
    /// Object of the arrow category for an object of the right category.
    pub fn b_object(&self, b: usize) -> usize {
        b
    }

    /// Object of the arrow category for an object of the left category.
    pub fn a_object(&self, a: usize) -> usize {
        self.incl_b.source.num_objects() + a
    }
}

/// Objects of `𝔟` come first, then those of `𝔞` (tagged `v:`/`u:` on a name
/// clash); cross homs `B → A` over `s` are `M_s(B, A)`.
pub fn arrow_category<F: Scalar>(m: &Bimodule<F>) -> ArrowCategory<F> {
    let (a, b) = (&m.left, &m.right);
    let base = arrow_cat_base(&m.carrier);
    let nb = b.num_objects();
    let names: Vec<&str> = (0..nb).map(|i| b.obj_name(i)).chain((0..a.num_objects()).map(|i| a.obj_name(i))).collect();
    let mut seen = HashSet::new();
    let clash = !names.iter().all(|n| seen.insert(*n));
    let tag = |side: &str, n: &str| if clash { format!("{side}:{n}") } else { n.to_string() };
    let mut objects: Vec<FiberObj> = (0..nb)
        .map(|i| FiberObj {
            name: tag("v", b.obj_name(i)),
            over: base.incl_v.obj(b.over(i)),
        })
        .collect();
    objects.extend((0..a.num_objects()).map(|i| FiberObj {
        name: tag("u", a.obj_name(i)),
        over: base.incl_u.obj(a.over(i)),
    }));
    let bkey = |h: Mor| {
        let (v, x, y) = b.key(h);
        (base.incl_v.mor(v), x, y)
    };
    let akey = |g: Mor| {
        let (u, x, y) = a.key(g);
        (base.incl_u.mor(u), nb + x, nb + y)
    };
    let mkey = |k: usize| {
        let (s, x, y) = m.key(k);
        (base.cross[s], x, nb + y)
    };
    let mut bases = HashMap::new();
    let mut products = HashMap::new();
    for (side, keyf) in [(b, &bkey as &dyn Fn(Mor) -> _), (a, &akey)] {
        let sc = side.sharp_cat();
        for f in sc.morphism_ids().filter(|&f| side.dim(f) > 0) {
            bases.insert(keyf(f), side.basis(f).to_vec());
            for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| side.dim(g) > 0) {
                for i in 0..side.dim(g) {
                    for j in 0..side.dim(f) {
                        let v = side.product_sparse(g, i, f, j);
                        if !v.is_empty() {
                            products.insert((keyf(g), i, keyf(f), j), v.to_vec());
                        }
                    }
                }
            }
        }
    }
    for k in (0..m.num_spaces()).filter(|&k| m.dim(k) > 0) {
        bases.insert(mkey(k), m.basis(k).to_vec());
        let (_, bo, ao) = m.key(k);
        let asc = a.sharp_cat();
        for &g in asc.out_mors(crate::fincat::Obj(ao)).iter().filter(|&&g| a.dim(g) > 0) {
            let cols = m.left_matrix(g, k);
            for i in 0..a.dim(g) {
                for j in 0..m.dim(k) {
                    let v = super::to_sparse(&cols.column(i * m.dim(k) + j));
                    if !v.is_empty() {
                        products.insert((akey(g), i, mkey(k), j), v);
                    }
                }
            }
        }
        let bsc = b.sharp_cat();
        for h in bsc.hom_into(crate::fincat::Obj(bo)).into_iter().filter(|&h| b.dim(h) > 0) {
            let cols = m.right_matrix(k, h);
            for i in 0..m.dim(k) {
                for j in 0..b.dim(h) {
                    let v = super::to_sparse(&cols.column(i * b.dim(h) + j));
                    if !v.is_empty() {
                        products.insert((mkey(k), i, bkey(h), j), v);
                    }
                }
            }
        }
    }
    let identities = (0..nb)
        .map(|i| Some(b.identity_sparse(i).to_vec()))
        .chain((0..a.num_objects()).map(|i| Some(a.identity_sparse(i).to_vec())))
        .collect();
    let cat = Arc::new(
        GradedCat::assemble(RawGraded {
            base: base.cat.clone(),
            objects,
            bases,
            products,
            identities,
        })
        .expect("arrow category"),
    );
    let inclusion = |side: &Arc<GradedCat<F>>, shift: usize, keyf: &dyn Fn(Mor) -> (Mor, usize, usize), phi: &crate::fincat::Functor| {
        let homs = side
            .sharp_cat()
            .morphism_ids()
            .map(|f| {
                let (u, x, y) = keyf(f);
                debug_assert!(cat.sharp_mor(u, x, y).is_some());
                Matrix::identity(side.dim(f))
            })
            .collect();
        GradedFunctor::assemble(
            side.clone(),
            cat.clone(),
            phi.clone(),
            (0..side.num_objects()).map(|i| i + shift).collect(),
            homs,
        )
        .expect("inclusion into the arrow category")
    };
    let incl_b = inclusion(b, 0, &bkey, &base.incl_v);
    let incl_a = inclusion(a, nb, &akey, &base.incl_u);
    ArrowCategory {
        cat,
        base,
        incl_b,
        incl_a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimod::support_split;
    use crate::fincat::FinCat;
    use crate::mapgraded::restrict;
    use crate::Q;

    #[test]
    fn upper_triangular_matrices() {
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let arrow = arrow_category(&Bimodule::identity(&k));
        assert!(arrow.cat.axiom_violations().is_empty());
        assert_eq!(arrow.cat.num_objects(), 2);
        let dims: Vec<usize> = arrow.cat.sharp_cat().morphism_ids().map(|m| arrow.cat.dim(m)).collect();
        assert_eq!(dims, vec![1, 1, 1]);
        assert!(arrow.cat.base.is_poset());
        assert!(arrow.incl_a.is_cartesian() && arrow.incl_b.is_cartesian());
    }

    #[test]
    fn disjoint_part_and_cross_support() {
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let p = Arc::new(FinCat::chain(2));
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        for m in [Bimodule::identity(&lam), Bimodule::identity(&kp)] {
            let arrow = arrow_category(&m);
            assert!(arrow.cat.axiom_violations().is_empty(), "{:?}", arrow.cat.axiom_violations());
            let disjoint = arrow.base.incl_disjoint();
            let (r, _) = restrict(&arrow.cat, &disjoint);
            assert_eq!(r.total_dim(), m.left.total_dim() + m.right.total_dim());
            // (1_𝔠) supported on the cross morphisms is M
            let one = Bimodule::identity(&arrow.cat);
            let split = support_split(&one, &arrow.base.ideal(), &disjoint).unwrap();
            assert_eq!(split.sub.total_dim(), m.total_dim());
            for k in 0..m.num_spaces() {
                let (s, bo, ao) = m.key(k);
                let c = split
                    .sub
                    .find((arrow.base.cross[s].0, arrow.b_object(bo), arrow.a_object(ao)))
                    .unwrap();
                assert_eq!(split.sub.dim(c), m.dim(k));
            }
        }
    }
}
