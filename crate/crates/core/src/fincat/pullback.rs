use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::{CatRef, FinCat, Functor, Mor, MorData, Obj};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PullbackError {
    #[error("functors have different targets")]
    TargetMismatch,
}

/// `V1 ×_U V2` with its projections. Objects and morphisms are the
/// compatible pairs in lexicographic order, named `(a,b)`.
#[derive(Clone, Debug)]
pub struct CatPullback {
    pub cat: CatRef,
    pub p1: Functor,
    pub p2: Functor,
    obj_index: HashMap<(Obj, Obj), Obj>,
    mor_index: HashMap<(Mor, Mor), Mor>,
}

impl CatPullback {
    pub fn obj_of(&self, a: Obj, b: Obj) -> Option<Obj> {
        self.obj_index.get(&(a, b)).copied()
    }

    pub fn mor_of(&self, a: Mor, b: Mor) -> Option<Mor> {
        self.mor_index.get(&(a, b)).copied()
    }

    /// The functor `V1 ×_U V2 → U`.
    pub fn to_base(&self, f1: &Functor) -> Functor {
        f1.after(&self.p1)
    }
}

pub fn pullback_cat(f1: &Functor, f2: &Functor) -> Result<CatPullback, PullbackError> {
    if *f1.target != *f2.target {
        return Err(PullbackError::TargetMismatch);
    }
    let (v1, v2) = (&f1.source, &f2.source);
    let mut objs = Vec::new();
    for a in v1.object_ids() {
        for b in v2.object_ids() {
            if f1.obj(a) == f2.obj(b) {
                objs.push((a, b));
            }
        }
    }
    let obj_index: HashMap<(Obj, Obj), Obj> =
        objs.iter().enumerate().map(|(i, &p)| (p, Obj(i))).collect();
    let mut mors = Vec::new();
    for a in v1.morphism_ids() {
        for b in v2.morphism_ids() {
            if f1.mor(a) == f2.mor(b) {
                mors.push((a, b));
            }
        }
    }
    let mor_index: HashMap<(Mor, Mor), Mor> =
        mors.iter().enumerate().map(|(i, &p)| (p, Mor(i))).collect();
    let morphisms: Vec<MorData> = mors
        .iter()
        .map(|&(a, b)| MorData {
            name: format!("({},{})", v1.mor_name(a), v2.mor_name(b)),
            src: obj_index[&(v1.src(a), v2.src(b))],
            tgt: obj_index[&(v1.tgt(a), v2.tgt(b))],
        })
        .collect();
    let identity = objs
        .iter()
        .map(|&(a, b)| mor_index[&(v1.id(a), v2.id(b))])
        .collect();
    let n = mors.len();
    let mut comp = vec![None; n * n];
    for (gi, &(g1, g2)) in mors.iter().enumerate() {
        for (fi, &(h1, h2)) in mors.iter().enumerate() {
            if let (Some(c1), Some(c2)) = (v1.compose(g1, h1), v2.compose(g2, h2)) {
                comp[gi * n + fi] = Some(mor_index[&(c1, c2)]);
            }
        }
    }
    let cat = Arc::new(FinCat::assemble(
        objs.iter()
            .map(|&(a, b)| format!("({},{})", v1.obj_name(a), v2.obj_name(b)))
            .collect(),
        morphisms,
        identity,
        comp,
    ));
    let p1 = Functor::new(
        cat.clone(),
        v1.clone(),
        objs.iter().map(|p| p.0).collect(),
        mors.iter().map(|p| p.0).collect(),
    )
    .expect("first projection");
    let p2 = Functor::new(
        cat.clone(),
        v2.clone(),
        objs.iter().map(|p| p.1).collect(),
        mors.iter().map(|p| p.1).collect(),
    )
    .expect("second projection");
    Ok(CatPullback {
        cat,
        p1,
        p2,
        obj_index,
        mor_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::nerve;

    fn vposet() -> CatRef {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    fn chain_inclusion(p: &CatRef, objs: &[&str]) -> Functor {
        let ids: Vec<Obj> = objs.iter().map(|o| p.find_object(o).unwrap()).collect();
        let (sub, o, m) = p.full_subcategory(&ids);
        Functor::from_sub(Arc::new(sub), p.clone(), o, m)
    }

    #[test]
    fn identity_pullback_is_isomorphic() {
        let p = vposet();
        let id = Functor::identity(&p);
        let pb = pullback_cat(&id, &id).unwrap();
        assert_eq!(pb.cat.num_objects(), 3);
        assert_eq!(pb.cat.num_morphisms(), 5);
        assert!(pb.p1.is_isomorphism());
    }

    #[test]
    fn chain_overlap_is_a_point() {
        let p = vposet();
        let d0 = chain_inclusion(&p, &["s", "t0"]);
        let d1 = chain_inclusion(&p, &["s", "t1"]);
        let pb = pullback_cat(&d0, &d1).unwrap();
        assert_eq!((pb.cat.num_objects(), pb.cat.num_morphisms()), (1, 1));
    }

    #[test]
    fn nerve_of_pullback_is_pullback_of_nerves() {
        let p = vposet();
        let d0 = chain_inclusion(&p, &["s", "t0"]);
        let whole = Functor::identity(&p);
        let pb = pullback_cat(&d0, &whole).unwrap();
        for n in 0..=4 {
            let mut count = 0;
            for a in nerve(&d0.source, n) {
                for b in nerve(&whole.source, n) {
                    if a.image(&d0) == b.image(&whole) {
                        count += 1;
                    }
                }
            }
            assert_eq!(nerve(&pb.cat, n).len(), count);
        }
    }

    #[test]
    fn mismatched_targets() {
        let p = vposet();
        let q = Arc::new(FinCat::chain(1));
        assert!(matches!(
            pullback_cat(&Functor::identity(&p), &Functor::identity(&q)),
            Err(PullbackError::TargetMismatch)
        ));
    }
}
