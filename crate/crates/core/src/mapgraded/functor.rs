use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::{FiberObj, GradedCat, RawGraded, SparseVec};
use crate::fincat::{Functor, Mor, Obj};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GradedFunctorError {
    #[error("base functor does not match the graded categories")]
    BaseMismatch,
    #[error("object {0} is sent outside the fiber over its image")]
    ObjectMap(String),
    #[error("hom map on {0} has the wrong shape")]
    HomShape(String),
    #[error("identity of {0} is not preserved")]
    Identity(String),
    #[error("composition {g} o {f} is not preserved")]
    Composition { g: String, f: String },
}

/// A `φ`-graded functor: an object map over `φ` and one matrix per
/// morphism of the source sharp category.
#[derive(Clone, Debug)]
pub struct GradedFunctor<F: Scalar> {
    pub source: Arc<GradedCat<F>>,
    pub target: Arc<GradedCat<F>>,
    pub base: Functor,
    obj_map: Vec<usize>,
    hom: Vec<Matrix<F>>,
}

impl<F: Scalar> GradedFunctor<F> {
    pub fn new(
        source: Arc<GradedCat<F>>,
        target: Arc<GradedCat<F>>,
        base: Functor,
        obj_map: Vec<usize>,
        hom: Vec<Matrix<F>>,
    ) -> Result<GradedFunctor<F>, GradedFunctorError> {
        let f = GradedFunctor::assemble(source, target, base, obj_map, hom)?;
        f.check_functoriality()?;
        Ok(f)
    }

    /// Checks shapes only.
    pub(crate) fn assemble(
        source: Arc<GradedCat<F>>,
        target: Arc<GradedCat<F>>,
        base: Functor,
        obj_map: Vec<usize>,
        hom: Vec<Matrix<F>>,
    ) -> Result<GradedFunctor<F>, GradedFunctorError> {
        if *base.source != *source.base
            || *base.target != *target.base
            || obj_map.len() != source.num_objects()
            || hom.len() != source.sharp_cat().num_morphisms()
        {
            return Err(GradedFunctorError::BaseMismatch);
        }
        for (b, &a) in obj_map.iter().enumerate() {
            if a >= target.num_objects() || target.over(a) != base.obj(source.over(b)) {
                return Err(GradedFunctorError::ObjectMap(source.obj_name(b).to_string()));
            }
        }
        let f = GradedFunctor {
            source,
            target,
            base,
            obj_map,
            hom,
        };
        for m in f.source.sharp_cat().morphism_ids() {
            let t = f.image_mor(m);
            if f.hom[m.0].nrows() != f.target.dim(t) || f.hom[m.0].ncols() != f.source.dim(m) {
                return Err(GradedFunctorError::HomShape(f.source.hom_name(m)));
            }
        }
        Ok(f)
    }

    fn check_functoriality(&self) -> Result<(), GradedFunctorError> {
        let (s, t) = (&self.source, &self.target);
        for b in 0..s.num_objects() {
            let id = s.identity_mor(b);
            if self.hom[id.0].mul_vec(&s.identity_vec(b)) != t.identity_vec(self.obj_map[b]) {
                return Err(GradedFunctorError::Identity(s.obj_name(b).to_string()));
            }
        }
        let sc = s.sharp_cat();
        for f in sc.morphism_ids().filter(|&f| s.dim(f) > 0) {
            for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| s.dim(g) > 0) {
                let gf = sc.compose(g, f).unwrap();
                let left = self.hom[gf.0].mul(&s.comp_matrix(g, f));
                let right = t
                    .comp_matrix(self.image_mor(g), self.image_mor(f))
                    .mul(&Matrix::kron(&self.hom[g.0], &self.hom[f.0]));
                if left != right {
                    return Err(GradedFunctorError::Composition {
                        g: s.hom_name(g),
                        f: s.hom_name(f),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &Arc<GradedCat<F>>) -> GradedFunctor<F> {
        let hom = a
            .sharp_cat()
            .morphism_ids()
            .map(|m| Matrix::identity(a.dim(m)))
            .collect();
        GradedFunctor {
            source: a.clone(),
            target: a.clone(),
            base: Functor::identity(&a.base),
            obj_map: (0..a.num_objects()).collect(),
            hom,
        }
    }

    pub fn obj(&self, b: usize) -> usize {
        self.obj_map[b]
    }

    pub fn obj_map(&self) -> &[usize] {
        &self.obj_map
    }

    /// Matrix on the hom over a morphism of the source sharp category.
    pub fn hom(&self, m: Mor) -> &Matrix<F> {
        &self.hom[m.0]
    }

    pub fn homs(&self) -> &[Matrix<F>] {
        &self.hom
    }

    /// Image of a source sharp morphism in the target sharp category.
    pub fn image_mor(&self, m: Mor) -> Mor {
        let (v, b, b2) = self.source.key(m);
        self.target
            .sharp_mor(self.base.mor(v), self.obj_map[b], self.obj_map[b2])
            .expect("image of a sharp morphism")
    }

    /// `φ^♯: V^♯ → U^♯`.
    pub fn sharp_functor(&self) -> Functor {
        let sc = self.source.sharp_cat();
        Functor::new(
            sc.clone(),
            self.target.sharp_cat().clone(),
            self.obj_map.iter().map(|&a| Obj(a)).collect(),
            sc.morphism_ids().map(|m| self.image_mor(m)).collect(),
        )
        .expect("sharp functor")
    }

    /// `F^♯: 𝔟^♯ → 𝔞^♯` over `φ^♯`, given the sharp constructions of source
    /// and target.
    pub fn sharpen(
        &self,
        source: &Arc<GradedCat<F>>,
        target: &Arc<GradedCat<F>>,
    ) -> Result<GradedFunctor<F>, GradedFunctorError> {
        GradedFunctor::new(
            source.clone(),
            target.clone(),
            self.sharp_functor(),
            self.obj_map.clone(),
            self.hom.clone(),
        )
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &GradedFunctor<F>) -> GradedFunctor<F> {
        assert!(Arc::ptr_eq(&inner.target, &self.source) || *inner.target.base == *self.source.base);
        let hom = inner
            .source
            .sharp_cat()
            .morphism_ids()
            .map(|m| self.hom[inner.image_mor(m).0].mul(&inner.hom[m.0]))
            .collect();
        GradedFunctor {
            source: inner.source.clone(),
            target: self.target.clone(),
            base: self.base.after(&inner.base),
            obj_map: inner.obj_map.iter().map(|&b| self.obj_map[b]).collect(),
            hom,
        }
    }

    /// Every hom map is invertible.
    pub fn is_subcartesian(&self) -> bool {
        self.hom.iter().all(Matrix::is_invertible)
    }

    /// Subcartesian and bijective on every fiber.
    pub fn is_cartesian(&self) -> bool {
        if !self.is_subcartesian() {
            return false;
        }
        let s = &self.source;
        s.base.object_ids().all(|v| {
            let image: HashSet<usize> = s.fiber(v).iter().map(|&b| self.obj_map[b]).collect();
            image.len() == s.fiber(v).len()
                && image.len() == self.target.fiber(self.base.obj(v)).len()
        })
    }

    /// Cartesian over an isomorphism of bases.
    pub fn is_isomorphism(&self) -> bool {
        self.base.is_isomorphism() && self.is_cartesian()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<GradedFunctor<F>> {
        if !self.is_isomorphism() {
            return None;
        }
        let (s, t) = (&self.source, &self.target);
        let mut base_obj = vec![Obj(0); t.base.num_objects()];
        for v in s.base.object_ids() {
            base_obj[self.base.obj(v).0] = v;
        }
        let mut base_mor = vec![Mor(0); t.base.num_morphisms()];
        for v in s.base.morphism_ids() {
            base_mor[self.base.mor(v).0] = v;
        }
        let base = Functor::new(t.base.clone(), s.base.clone(), base_obj, base_mor).ok()?;
        let mut obj_map = vec![0; t.num_objects()];
        for (b, &a) in self.obj_map.iter().enumerate() {
            obj_map[a] = b;
        }
        let mut hom = vec![Matrix::zeros(0, 0); t.sharp_cat().num_morphisms()];
        for m in s.sharp_cat().morphism_ids() {
            hom[self.image_mor(m).0] = self.hom[m.0].inverse()?;
        }
        GradedFunctor::assemble(t.clone(), s.clone(), base, obj_map, hom).ok()
    }
}

fn plain_or_tagged(objects: &mut [FiberObj], tag: impl Fn(Obj) -> String) {
    let mut seen = HashSet::new();
    if !objects.iter().all(|o| seen.insert(o.name.clone())) {
        for o in objects.iter_mut() {
            o.name = format!("{}@{}", o.name, tag(o.over));
        }
    }
}

/// `𝔞^φ` with the cartesian functor `δ^{φ,𝔞}: 𝔞^φ → 𝔞`. Objects keep their
/// names unless two of them would clash, in which case they are tagged
/// `A@V` with the base object they lie over.
pub fn restrict<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    phi: &Functor,
) -> (Arc<GradedCat<F>>, GradedFunctor<F>) {
    assert!(*phi.target == *a.base, "restriction along a functor into another base");
    let v = &phi.source;
    let mut objects = Vec::new();
    let mut origin = Vec::new();
    for o in v.object_ids() {
        for &x in a.fiber(phi.obj(o)) {
            objects.push(FiberObj {
                name: a.obj_name(x).to_string(),
                over: o,
            });
            origin.push(x);
        }
    }
    plain_or_tagged(&mut objects, |o| v.obj_name(o).to_string());
    let mut local: HashMap<(Obj, usize), usize> = HashMap::new();
    for (i, o) in objects.iter().enumerate() {
        local.insert((o.over, origin[i]), i);
    }
    let mut bases = HashMap::new();
    let mut keymap = Vec::new();
    for m in v.morphism_ids() {
        for &x in a.fiber(phi.obj(v.src(m))) {
            for &y in a.fiber(phi.obj(v.tgt(m))) {
                let am = a.sharp_mor(phi.mor(m), x, y).unwrap();
                let key = (m, local[&(v.src(m), x)], local[&(v.tgt(m), y)]);
                if a.dim(am) > 0 {
                    bases.insert(key, a.basis(am).to_vec());
                }
                keymap.push((key, am));
            }
        }
    }
    let mut products = HashMap::new();
    for &(gk, g) in &keymap {
        for &(fk, f) in keymap.iter().filter(|(fk, _)| fk.2 == gk.1) {
            for i in 0..a.dim(g) {
                for j in 0..a.dim(f) {
                    let p = a.product_sparse(g, i, f, j);
                    if !p.is_empty() {
                        products.insert((gk, i, fk, j), p.to_vec());
                    }
                }
            }
        }
    }
    let identities = origin
        .iter()
        .map(|&x| Some(a.identity_sparse(x).to_vec()))
        .collect();
    let r = Arc::new(
        GradedCat::assemble(RawGraded {
            base: v.clone(),
            objects,
            bases,
            products,
            identities,
        })
        .expect("restriction"),
    );
    let hom = r
        .sharp_cat()
        .morphism_ids()
        .map(|m| Matrix::identity(r.dim(m)))
        .collect();
    let delta = GradedFunctor::assemble(r.clone(), a.clone(), phi.clone(), origin, hom)
        .expect("restriction functor");
    (r, delta)
}

/// `𝔞^♯` over `U^♯` with the functor `𝔞^♯ → 𝔞` over the forgetful functor.
pub fn sharp<F: Scalar>(a: &Arc<GradedCat<F>>) -> (Arc<GradedCat<F>>, GradedFunctor<F>) {
    let sc = a.sharp_cat().clone();
    let mut raw = a.to_raw();
    raw.base = sc.clone();
    for (i, o) in raw.objects.iter_mut().enumerate() {
        o.over = Obj(i);
    }
    let rekey = |k: (Mor, usize, usize)| (a.sharp_mor(k.0, k.1, k.2).unwrap(), k.1, k.2);
    raw.bases = raw.bases.into_iter().map(|(k, b)| (rekey(k), b)).collect();
    raw.products = raw
        .products
        .into_iter()
        .map(|((g, i, f, j), v)| ((rekey(g), i, rekey(f), j), v))
        .collect();
    let s = Arc::new(GradedCat::assemble(raw).expect("sharp construction"));
    let forget = Functor::new(
        sc.clone(),
        a.base.clone(),
        (0..a.num_objects()).map(|i| a.over(i)).collect(),
        sc.morphism_ids().map(|m| a.key(m).0).collect(),
    )
    .expect("forgetful functor");
    let hom = s
        .sharp_cat()
        .morphism_ids()
        .map(|m| Matrix::identity(s.dim(m)))
        .collect();
    let f = GradedFunctor::assemble(s.clone(), a.clone(), forget, (0..a.num_objects()).collect(), hom)
        .expect("sharp functor");
    (s, f)
}

/// Transports `a` along invertible matrices `p[m]` on each hom (indexed by
/// sharp morphism). Returns the new category and the isomorphism from `a`.
pub fn change_basis<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    p: &[Matrix<F>],
) -> (Arc<GradedCat<F>>, GradedFunctor<F>) {
    let sc = a.sharp_cat();
    let inv: Vec<Matrix<F>> = p
        .iter()
        .map(|m| m.inverse().expect("change of basis must be invertible"))
        .collect();
    let mut raw = a.to_raw();
    raw.products.clear();
    for f in sc.morphism_ids().filter(|&f| a.dim(f) > 0) {
        for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| a.dim(g) > 0) {
            let gf = sc.compose(g, f).unwrap();
            let c = p[gf.0]
                .mul(&a.comp_matrix(g, f))
                .mul(&Matrix::kron(&inv[g.0], &inv[f.0]));
            let df = a.dim(f);
            for col in 0..c.ncols() {
                let v: SparseVec<F> = c
                    .column(col)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect();
                if !v.is_empty() {
                    raw.products
                        .insert((a.key(g), col / df, a.key(f), col % df), v);
                }
            }
        }
    }
    raw.identities = (0..a.num_objects())
        .map(|x| {
            let m = a.identity_mor(x);
            Some(
                p[m.0]
                    .mul_vec(&a.identity_vec(x))
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect(),
            )
        })
        .collect();
    let b = Arc::new(GradedCat::assemble(raw).expect("change of basis"));
    let f = GradedFunctor::assemble(
        a.clone(),
        b.clone(),
        Functor::identity(&a.base),
        (0..a.num_objects()).collect(),
        p.to_vec(),
    )
    .expect("change of basis functor");
    (b, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCat;
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
    fn restriction_is_cartesian_and_functorial() {
        let p = vposet();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (id_r, id_d) = restrict(&a, &Functor::identity(&p));
        assert!(id_r.structurally_equal(&a));
        assert!(id_d.is_cartesian());
        let phi = sub(&p, &["s", "t0"]);
        let (r, d) = restrict(&a, &phi);
        assert!(d.is_cartesian() && d.is_subcartesian());
        assert!(r.axiom_violations().is_empty());
        assert!(r.structurally_equal(&GradedCat::free(&phi.source)));
        // restricting twice equals restricting along the composite
        let psi = sub(&phi.source, &["s"]);
        let (rr, _) = restrict(&r, &psi);
        let (r2, _) = restrict(&a, &phi.after(&psi));
        assert!(rr.structurally_equal(&r2));
    }

    #[test]
    fn sharp_of_trivially_graded_is_standard() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let (s, f) = sharp(&a);
        assert_eq!(s.num_objects(), 1);
        assert!(f.is_cartesian());
        let (ss, _) = sharp(&s);
        assert!(ss.sharp_cat().num_morphisms() == s.sharp_cat().num_morphisms());
        assert!(s.axiom_violations().is_empty());
    }

    #[test]
    fn fully_faithful_inclusion_is_subcartesian_only() {
        // two objects over e, the inclusion of one of them
        let e = Arc::new(FinCat::terminal());
        let two = Arc::new(FinCat::discrete(&["x", "y"]));
        let bang = Functor::new(two.clone(), e.clone(), vec![Obj(0), Obj(0)], vec![Mor(0), Mor(0)]).unwrap();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::linearize(&bang));
        let b: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let key = a.identity_mor(0);
        let mut hom = vec![Matrix::zeros(0, 0); 1];
        hom[0] = Matrix::identity(1);
        assert_eq!(a.dim(key), 1);
        let f = GradedFunctor::new(b.clone(), a.clone(), Functor::identity(&e), vec![0], hom).unwrap();
        assert!(f.is_subcartesian());
        assert!(!f.is_cartesian());
        assert!(f.sharp_functor().is_injective_on_morphisms());
        // subcartesian iff the sharpened functor is cartesian
        let fs = f.sharpen(&sharp(&b).0, &sharp(&a).0).unwrap();
        assert!(fs.is_cartesian());
    }

    #[test]
    fn zero_map_is_neither() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        // the unit must be preserved, so a zero map is rejected outright
        let z = GradedFunctor::new(
            a.clone(),
            a.clone(),
            Functor::identity(&a.base),
            vec![0],
            vec![Matrix::zeros(2, 2)],
        );
        assert!(matches!(z, Err(GradedFunctorError::Identity(_))));
        // as raw data it is neither subcartesian nor cartesian
        let raw = GradedFunctor::assemble(
            a.clone(),
            a.clone(),
            Functor::identity(&a.base),
            vec![0],
            vec![Matrix::zeros(2, 2)],
        )
        .unwrap();
        assert!(!raw.is_subcartesian() && !raw.is_cartesian());
    }

    #[test]
    fn change_of_basis_is_an_isomorphism() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(3));
        let p = vec![Matrix::from_i64(3, 3, &[&[1, 1, 0], &[0, 2, 1], &[0, 0, 1]])];
        let (b, f) = change_basis(&a, &p);
        assert!(b.axiom_violations().is_empty());
        let checked = GradedFunctor::new(a.clone(), b.clone(), f.base.clone(), f.obj_map().to_vec(), f.homs().to_vec());
        assert!(checked.is_ok());
        let inv = f.inverse().unwrap();
        assert!(GradedFunctor::new(b, a, inv.base.clone(), inv.obj_map().to_vec(), inv.homs().to_vec()).is_ok());
    }
}
