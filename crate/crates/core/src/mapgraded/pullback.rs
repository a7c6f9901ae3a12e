use std::collections::HashMap;
use std::sync::Arc;

use super::{FiberObj, GradedCat, GradedFunctor, RawGraded, SharpKey};
use crate::fincat::{pullback_cat, CatPullback, Mor, PullbackError};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

/// `𝔟1 ×_𝔞 𝔟2` over `V1 ×_U V2` with its projections.
#[derive(Clone, Debug)]
pub struct GradedPullback<F: Scalar> {
    pub cat: Arc<GradedCat<F>>,
    pub base: CatPullback,
    pub p1: GradedFunctor<F>,
    pub p2: GradedFunctor<F>,
}

/// Objects are the pairs `(B1, B2)` with `F1 B1 = F2 B2` over a base pair;
/// homs are the equalizers `{(x1, x2) | F1 x1 = F2 x2}`, with kernel-basis
/// elements named `p0, p1, …`.
pub fn pullback_graded<F: Scalar>(
    f1: &GradedFunctor<F>,
    f2: &GradedFunctor<F>,
) -> Result<GradedPullback<F>, PullbackError> {
    if *f1.target.base != *f2.target.base
        || f1.target.sharp_cat().num_morphisms() != f2.target.sharp_cat().num_morphisms()
    {
        return Err(PullbackError::TargetMismatch);
    }
    let (b1, b2) = (&f1.source, &f2.source);
    let base = pullback_cat(&f1.base, &f2.base)?;
    let w = &base.cat;
    let mut objects = Vec::new();
    let mut pairs = Vec::new();
    for o in w.object_ids() {
        let (v1, v2) = (base.p1.obj(o), base.p2.obj(o));
        for &x in b1.fiber(v1) {
            for &y in b2.fiber(v2) {
                if f1.obj(x) == f2.obj(y) {
                    objects.push(FiberObj {
                        name: format!("({},{})", b1.obj_name(x), b2.obj_name(y)),
                        over: o,
                    });
                    pairs.push((x, y));
                }
            }
        }
    }
    // kernel basis of [H1 | -H2] per hom of the pullback
    let mut kernels: HashMap<SharpKey, (Mor, Mor, Matrix<F>)> = HashMap::new();
    for m in w.morphism_ids() {
        let (m1, m2) = (base.p1.mor(m), base.p2.mor(m));
        for (s, &(x, y)) in pairs.iter().enumerate().filter(|(s, _)| objects[*s].over == w.src(m)) {
            for (t, &(x2, y2)) in pairs.iter().enumerate().filter(|(t, _)| objects[*t].over == w.tgt(m)) {
                let g1 = b1.sharp_mor(m1, x, x2).unwrap();
                let g2 = b2.sharp_mor(m2, y, y2).unwrap();
                let h1 = f1.hom(g1);
                let h2 = f2.hom(g2).neg();
                let k = Matrix::hstack(h1.nrows(), &[h1, &h2]).kernel_basis();
                kernels.insert((m, s, t), (g1, g2, k));
            }
        }
    }
    let mut bases = HashMap::new();
    for (key, (_, _, k)) in &kernels {
        if k.ncols() > 0 {
            bases.insert(*key, (0..k.ncols()).map(|i| format!("p{i}")).collect());
        }
    }
    let split = |g1: Mor, k: &Matrix<F>| {
        let d1 = b1.dim(g1);
        let top: Vec<usize> = (0..d1).collect();
        let bottom: Vec<usize> = (d1..k.nrows()).collect();
        (k.select_rows(&top), k.select_rows(&bottom))
    };
    let mut products = HashMap::new();
    for (&gk, (g1, g2, kg)) in &kernels {
        for (&fk, (h1, h2, kf)) in kernels.iter().filter(|(fk, _)| fk.2 == gk.1) {
            if kg.ncols() == 0 || kf.ncols() == 0 {
                continue;
            }
            let gf = (w.compose(gk.0, fk.0).unwrap(), fk.1, gk.2);
            let (c1, c2, kgf) = &kernels[&gf];
            let (gt, gb) = split(*g1, kg);
            let (ft, fb) = split(*h1, kf);
            for i in 0..kg.ncols() {
                for j in 0..kf.ncols() {
                    let mut v = b1.compose_vec(*g1, &gt.column(i), *h1, &ft.column(j));
                    v.extend(b2.compose_vec(*g2, &gb.column(i), *h2, &fb.column(j)));
                    debug_assert_eq!(v.len(), b1.dim(*c1) + b2.dim(*c2));
                    let c = kgf
                        .solve(&Matrix::column_vector(&v))
                        .expect("pullback homs are closed under composition");
                    let sv: Vec<(usize, F)> = c
                        .column(0)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .collect();
                    if !sv.is_empty() {
                        products.insert((gk, i, fk, j), sv);
                    }
                }
            }
        }
    }
    let identities = pairs
        .iter()
        .enumerate()
        .map(|(s, &(x, y))| {
            let key = (w.id(objects[s].over), s, s);
            let (_, _, k) = &kernels[&key];
            let mut v = b1.identity_vec(x);
            v.extend(b2.identity_vec(y));
            let c = k
                .solve(&Matrix::column_vector(&v))
                .expect("identity pairs lie in the pullback");
            Some(
                c.column(0)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            )
        })
        .collect();
    let cat = Arc::new(
        GradedCat::assemble(RawGraded {
            base: w.clone(),
            objects,
            bases,
            products,
            identities,
        })
        .expect("pullback of graded categories"),
    );
    let mut hom1 = Vec::new();
    let mut hom2 = Vec::new();
    for m in cat.sharp_cat().morphism_ids() {
        let (g1, _, k) = &kernels[&cat.key(m)];
        let (top, bottom) = split(*g1, k);
        hom1.push(top);
        hom2.push(bottom);
    }
    let p1 = GradedFunctor::assemble(
        cat.clone(),
        b1.clone(),
        base.p1.clone(),
        pairs.iter().map(|p| p.0).collect(),
        hom1,
    )
    .expect("first projection");
    let p2 = GradedFunctor::assemble(
        cat.clone(),
        b2.clone(),
        base.p2.clone(),
        pairs.iter().map(|p| p.1).collect(),
        hom2,
    )
    .expect("second projection");
    Ok(GradedPullback { cat, base, p1, p2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinCat, Functor, Obj};
    use crate::mapgraded::restrict;
    use crate::Q;

    fn vposet() -> Arc<FinCat> {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    fn sub(p: &Arc<FinCat>, names: &[&str]) -> Functor {
        let ids: Vec<Obj> = names.iter().map(|n| p.find_object(n).unwrap()).collect();
        let (c, o, m) = p.full_subcategory(&ids);
        Functor::from_sub(Arc::new(c), p.clone(), o, m)
    }

    #[test]
    fn identity_pullback() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(3));
        let id = GradedFunctor::identity(&a);
        let pb = pullback_graded(&id, &id).unwrap();
        assert!(pb.cat.axiom_violations().is_empty());
        assert!(pb.p1.is_isomorphism() && pb.p2.is_isomorphism());
        let p1 = &pb.p1;
        assert!(GradedFunctor::new(p1.source.clone(), p1.target.clone(), p1.base.clone(), p1.obj_map().to_vec(), p1.homs().to_vec()).is_ok());
    }

    #[test]
    fn restrictions_meet_in_intersection() {
        let p = vposet();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (_, d0) = restrict(&a, &sub(&p, &["s", "t0"]));
        let (_, d1) = restrict(&a, &sub(&p, &["s", "t1"]));
        let pb = pullback_graded(&d0, &d1).unwrap();
        assert_eq!(pb.cat.num_objects(), 1);
        assert_eq!(pb.cat.total_dim(), 1);
        assert!(pb.cat.axiom_violations().is_empty());
        // same shape as the restriction to {s}, up to renaming the base
        let (r, _) = restrict(&a, &sub(&p, &["s"]));
        assert_eq!(pb.cat.base.num_morphisms(), r.base.num_morphisms());
        assert_eq!(pb.cat.to_raw().products.len(), r.to_raw().products.len());
        assert!(pb.p1.is_cartesian() && pb.p2.is_cartesian());
    }

    #[test]
    fn hom_dimensions_are_bounded() {
        // F1 = id, F2 = projection-like inclusion of the ground field
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let inc = GradedFunctor::new(
            k.clone(),
            a.clone(),
            Functor::identity(&a.base),
            vec![0],
            vec![Matrix::from_i64(2, 1, &[&[1], &[0]])],
        )
        .unwrap();
        let pb = pullback_graded(&GradedFunctor::identity(&a), &inc).unwrap();
        assert_eq!(pb.cat.total_dim(), 1);
        assert!(pb.cat.axiom_violations().is_empty());
    }

    #[test]
    fn mismatched_targets() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let b: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&vposet()));
        assert!(pullback_graded(&GradedFunctor::identity(&a), &GradedFunctor::identity(&b)).is_err());
    }
}
