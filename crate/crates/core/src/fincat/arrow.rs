use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use super::{CatRef, Elem, FinCat, Functor, Mor, MorData, Obj, SetBifunctor};

/// A two-sided ideal: a set of morphisms closed under composition with
/// arbitrary morphisms on either side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    pub ambient: CatRef,
    members: BTreeSet<Mor>,
}

impl Ideal {
    /// `None` if `members` is not closed.
    pub fn new(ambient: CatRef, members: impl IntoIterator<Item = Mor>) -> Option<Ideal> {
        let members: BTreeSet<Mor> = members.into_iter().collect();
        let list: Vec<Mor> = members.iter().copied().collect();
        if is_ideal(&ambient, &list) {
            Some(Ideal { ambient, members })
        } else {
            None
        }
    }

    pub fn by_names(ambient: CatRef, names: &[&str]) -> Option<Ideal> {
        let mors: Option<Vec<Mor>> = names.iter().map(|n| ambient.find_morphism(n)).collect();
        Ideal::new(ambient, mors?)
    }

    pub fn contains(&self, m: Mor) -> bool {
        self.members.contains(&m)
    }

    pub fn members(&self) -> impl Iterator<Item = Mor> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_thin(&self) -> bool {
        let list: Vec<Mor> = self.members().collect();
        is_thin_ideal(&self.ambient, &list)
    }

    /// The morphisms outside the ideal, as a subcategory with its inclusion,
    /// or `None` if they are not closed under composition.
    pub fn complement(&self) -> Option<Functor> {
        let c = &self.ambient;
        let rest: Vec<Mor> = c.morphism_ids().filter(|m| !self.contains(*m)).collect();
        let (sub, objs, mors) = c.subcategory(&rest).ok()?;
        if mors.len() != rest.len() {
            return None;
        }
        Some(Functor::from_sub(Arc::new(sub), c.clone(), objs, mors))
    }
}

pub fn is_ideal(c: &FinCat, members: &[Mor]) -> bool {
    let set: HashSet<Mor> = members.iter().copied().collect();
    members.iter().all(|&z| {
        c.out_mors(c.tgt(z))
            .iter()
            .all(|&u| set.contains(&c.compose(u, z).unwrap()))
            && c.hom_into(c.src(z))
                .iter()
                .all(|&u| set.contains(&c.compose(z, u).unwrap()))
    })
}

/// An ideal containing no two consecutive morphisms.
pub fn is_thin_ideal(c: &FinCat, members: &[Mor]) -> bool {
    let set: HashSet<Mor> = members.iter().copied().collect();
    is_ideal(c, members)
        && members
            .iter()
            .all(|&z| c.out_mors(c.tgt(z)).iter().all(|u| !set.contains(u)))
}

/// `Mor(C)` is the disjoint union of the image of `v` and `z`, with `v` an
/// injective functor into `C`.
pub fn decomposition_check(c: &FinCat, z: &Ideal, v: &Functor) -> bool {
    if *z.ambient != *c || *v.target != *c || !v.is_injective_on_morphisms() {
        return false;
    }
    let image: HashSet<Mor> = v.mor_map().iter().copied().collect();
    c.morphism_ids()
        .all(|m| image.contains(&m) != z.contains(m))
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ArrowError {
    #[error("not an ideal")]
    NotIdeal,
    #[error("ideal is not thin: {second} follows {first}")]
    NotThin { first: String, second: String },
    #[error("objects neither above nor below the ideal: {}", .0.join(", "))]
    ObjectsNotCovered(Vec<String>),
    #[error("cross morphisms outside the ideal: {}", .0.join(", "))]
    ExtraCrossMorphisms(Vec<String>),
    #[error("not a poset: {0}")]
    NotPoset(String),
}

/// The arrow category `V →_S U` with its two inclusions. Objects of `V`
/// come first, then those of `U`; morphisms are those of `V`, then `U`,
/// then the elements of `S`.
#[derive(Clone, Debug)]
pub struct ArrowBase {
    pub cat: CatRef,
    pub incl_v: Functor,
    pub incl_u: Functor,
    /// Morphism of `cat` for each element of `S`.
    pub cross: Vec<Mor>,
}

impl ArrowBase {
    /// The thin ideal formed by the cross morphisms.
    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.cat.clone(), self.cross.iter().copied()).expect("cross morphisms form an ideal")
    }

    /// The inclusion of `U ⊔ V` (the complement of the ideal).
    pub fn incl_disjoint(&self) -> Functor {
        self.ideal().complement().expect("complement of the cross morphisms")
    }
}

/// `S` is a `U`-`V`-bifunctor: `left = U`, `right = V`.
pub fn arrow_cat_base(s: &SetBifunctor) -> ArrowBase {
    let (u, v) = (&s.left, &s.right);
    let nvo = v.num_objects();
    let (nvm, num) = (v.num_morphisms(), u.num_morphisms());
    let obj_names: Vec<&str> = v.object_names().iter().chain(u.object_names()).map(String::as_str).collect();
    let mor_names: Vec<&str> = v
        .morphism_ids()
        .map(|m| v.mor_name(m))
        .chain(u.morphism_ids().map(|m| u.mor_name(m)))
        .chain(s.elems().iter().map(|e| e.name.as_str()))
        .collect();
    let clash = has_duplicates(&obj_names) || has_duplicates(&mor_names);
    let tag = |side: &str, name: &str| {
        if clash {
            format!("{side}:{name}")
        } else {
            name.to_string()
        }
    };
    let objects: Vec<String> = v
        .object_ids()
        .map(|o| tag("v", v.obj_name(o)))
        .chain(u.object_ids().map(|o| tag("u", u.obj_name(o))))
        .collect();
    let uo = |o: Obj| Obj(nvo + o.0);
    let mut morphisms: Vec<MorData> = v
        .morphism_ids()
        .map(|m| MorData {
            name: tag("v", v.mor_name(m)),
            src: v.src(m),
            tgt: v.tgt(m),
        })
        .collect();
    morphisms.extend(u.morphism_ids().map(|m| MorData {
        name: tag("u", u.mor_name(m)),
        src: uo(u.src(m)),
        tgt: uo(u.tgt(m)),
    }));
    morphisms.extend(s.elems().iter().map(|e: &Elem| MorData {
        name: e.name.clone(),
        src: e.src,
        tgt: uo(e.tgt),
    }));
    let identity: Vec<Mor> = v
        .object_ids()
        .map(|o| v.id(o))
        .chain(u.object_ids().map(|o| Mor(nvm + u.id(o).0)))
        .collect();
    let n = morphisms.len();
    let um = |m: Mor| Mor(nvm + m.0);
    let sm = |e: usize| Mor(nvm + num + e);
    let mut comp = vec![None; n * n];
    for g in v.morphism_ids() {
        for f in v.morphism_ids() {
            comp[g.0 * n + f.0] = v.compose(g, f);
        }
    }
    for g in u.morphism_ids() {
        for f in u.morphism_ids() {
            comp[um(g).0 * n + um(f).0] = u.compose(g, f).map(um);
        }
    }
    for (e, el) in s.elems().iter().enumerate() {
        for f in v.morphism_ids().filter(|&f| v.tgt(f) == el.src) {
            comp[sm(e).0 * n + f.0] = Some(sm(s.act_right(e, f)));
        }
        for &g in u.out_mors(el.tgt) {
            comp[um(g).0 * n + sm(e).0] = Some(sm(s.act_left(g, e)));
        }
    }
    let cat = FinCat::assemble(objects, morphisms, identity, comp);
    debug_assert!(cat.axiom_violations().is_empty());
    let cat = Arc::new(cat);
    let incl_v = Functor::new(
        v.clone(),
        cat.clone(),
        v.object_ids().collect(),
        v.morphism_ids().collect(),
    )
    .expect("inclusion of V");
    let incl_u = Functor::new(
        u.clone(),
        cat.clone(),
        u.object_ids().map(uo).collect(),
        u.morphism_ids().map(um).collect(),
    )
    .expect("inclusion of U");
    ArrowBase {
        cat,
        incl_v,
        incl_u,
        cross: (0..s.num_elems()).map(sm).collect(),
    }
}

fn has_duplicates(names: &[&str]) -> bool {
    let mut seen = HashSet::new();
    !names.iter().all(|n| seen.insert(*n))
}

/// Successful outcome of [`recognize_arrow`].
#[derive(Clone, Debug)]
pub struct ArrowRecognition {
    /// Full subcategory of objects reached by a path starting in the ideal.
    pub incl_u: Functor,
    /// Full subcategory of objects from which a path ends in the ideal.
    pub incl_v: Functor,
    /// The ideal restricted to a `U`-`V`-bifunctor; elements follow the
    /// morphism order of `W`.
    pub bifunctor: SetBifunctor,
    pub base: ArrowBase,
    /// Isomorphism `V →_S U ≅ W`.
    pub iso: Functor,
}

/// Decides whether `W` is the arrow category of the thin ideal `s`.
pub fn recognize_arrow(w: &CatRef, s: &Ideal) -> Result<ArrowRecognition, ArrowError> {
    let members: Vec<Mor> = s.members().collect();
    if !is_ideal(w, &members) {
        return Err(ArrowError::NotIdeal);
    }
    for &z in &members {
        if let Some(&u) = w.out_mors(w.tgt(z)).iter().find(|u| s.contains(**u)) {
            return Err(ArrowError::NotThin {
                first: w.mor_name(z).to_string(),
                second: w.mor_name(u).to_string(),
            });
        }
    }
    // objects below: a path ends with a morphism of the ideal
    let mut below = vec![false; w.num_objects()];
    let mut queue: VecDeque<Obj> = VecDeque::new();
    for &z in &members {
        if !below[w.src(z).0] {
            below[w.src(z).0] = true;
            queue.push_back(w.src(z));
        }
    }
    while let Some(o) = queue.pop_front() {
        for m in w.hom_into(o) {
            let x = w.src(m);
            if !below[x.0] {
                below[x.0] = true;
                queue.push_back(x);
            }
        }
    }
    // objects above: a path starts with a morphism of the ideal
    let mut above = vec![false; w.num_objects()];
    for &z in &members {
        if !above[w.tgt(z).0] {
            above[w.tgt(z).0] = true;
            queue.push_back(w.tgt(z));
        }
    }
    while let Some(o) = queue.pop_front() {
        for &m in w.out_mors(o) {
            let x = w.tgt(m);
            if !above[x.0] {
                above[x.0] = true;
                queue.push_back(x);
            }
        }
    }
    let missing: Vec<String> = w
        .object_ids()
        .filter(|o| !below[o.0] && !above[o.0])
        .map(|o| w.obj_name(o).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ArrowError::ObjectsNotCovered(missing));
    }
    let v_objs: Vec<Obj> = w.object_ids().filter(|o| below[o.0]).collect();
    let u_objs: Vec<Obj> = w.object_ids().filter(|o| above[o.0]).collect();
    let mut extra = Vec::new();
    for &b in &v_objs {
        for &a in &u_objs {
            extra.extend(
                w.hom(b, a)
                    .iter()
                    .filter(|m| !s.contains(**m))
                    .map(|&m| w.mor_name(m).to_string()),
            );
        }
    }
    if !extra.is_empty() {
        return Err(ArrowError::ExtraCrossMorphisms(extra));
    }
    let full = |objs: &[Obj]| {
        let (sub, o, m) = w.full_subcategory(objs);
        Functor::from_sub(Arc::new(sub), w.clone(), o, m)
    };
    let incl_u = full(&u_objs);
    let incl_v = full(&v_objs);
    let local = |objs: &[Obj]| -> HashMap<Obj, Obj> {
        objs.iter().enumerate().map(|(i, &o)| (o, Obj(i))).collect()
    };
    let (lu, lv) = (local(&u_objs), local(&v_objs));
    let elem_index: HashMap<Mor, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let elems = members
        .iter()
        .map(|&m| Elem {
            name: w.mor_name(m).to_string(),
            src: lv[&w.src(m)],
            tgt: lu[&w.tgt(m)],
        })
        .collect();
    let bifunctor = SetBifunctor::new(
        incl_u.source.clone(),
        incl_v.source.clone(),
        elems,
        |g, e| elem_index[&w.compose(incl_u.mor(g), members[e]).unwrap()],
        |e, f| elem_index[&w.compose(members[e], incl_v.mor(f)).unwrap()],
    )
    .expect("restriction of an ideal is a bifunctor");
    let base = arrow_cat_base(&bifunctor);
    let obj_map: Vec<Obj> = v_objs.iter().chain(&u_objs).copied().collect();
    let mor_map: Vec<Mor> = incl_v
        .mor_map()
        .iter()
        .chain(incl_u.mor_map())
        .chain(&members)
        .copied()
        .collect();
    let iso = Functor::new(base.cat.clone(), w.clone(), obj_map, mor_map)
        .expect("comparison functor of an arrow category");
    debug_assert!(iso.is_isomorphism());
    Ok(ArrowRecognition {
        incl_u,
        incl_v,
        bifunctor,
        base,
        iso,
    })
}

/// Maximal chains of a finite poset with their pairwise intersections.
#[derive(Clone, Debug)]
pub struct ChainCover {
    /// Objects of each maximal chain, bottom first.
    pub chain_objects: Vec<Vec<Obj>>,
    pub chains: Vec<Functor>,
    /// `(i, j, inclusion of chain i ∩ chain j)` for `i < j`.
    pub intersections: Vec<(usize, usize, Functor)>,
}

pub fn chain_cover(p: &CatRef) -> Result<ChainCover, ArrowError> {
    if !p.is_poset() {
        return Err(ArrowError::NotPoset(
            "parallel morphisms or a cycle between distinct objects".into(),
        ));
    }
    let lt = |a: Obj, b: Obj| a != b && !p.hom(a, b).is_empty();
    let covers = |a: Obj| -> Vec<Obj> {
        p.object_ids()
            .filter(|&b| lt(a, b) && !p.object_ids().any(|c| lt(a, c) && lt(c, b)))
            .collect()
    };
    let mut chain_objects = Vec::new();
    let mut stack: Vec<Vec<Obj>> = p
        .object_ids()
        .filter(|&a| !p.object_ids().any(|b| lt(b, a)))
        .map(|a| vec![a])
        .collect();
    stack.reverse();
    while let Some(path) = stack.pop() {
        let next = covers(*path.last().unwrap());
        if next.is_empty() {
            chain_objects.push(path);
            continue;
        }
        for &b in next.iter().rev() {
            let mut q = path.clone();
            q.push(b);
            stack.push(q);
        }
    }
    let full = |objs: &[Obj]| {
        let (sub, o, m) = p.full_subcategory(objs);
        Functor::from_sub(Arc::new(sub), p.clone(), o, m)
    };
    let chains: Vec<Functor> = chain_objects.iter().map(|c| full(c)).collect();
    let mut intersections = Vec::new();
    for i in 0..chain_objects.len() {
        for j in i + 1..chain_objects.len() {
            let common: Vec<Obj> = chain_objects[i]
                .iter()
                .filter(|o| chain_objects[j].contains(o))
                .copied()
                .collect();
            intersections.push((i, j, full(&common)));
        }
    }
    Ok(ChainCover {
        chain_objects,
        chains,
        intersections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_n_cover, CoverDegree};

    fn a2() -> CatRef {
        Arc::new(FinCat::chain(1))
    }

    fn vposet() -> CatRef {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    #[test]
    fn single_arrow_is_thin_ideal() {
        let c = a2();
        let u = c.find_morphism("0<=1").unwrap();
        assert!(is_thin_ideal(&c, &[u]));
        let ids: Vec<Mor> = c.object_ids().map(|o| c.id(o)).collect();
        assert!(!is_ideal(&c, &ids));
    }

    #[test]
    fn vposet_decomposition() {
        let p = vposet();
        let z = Ideal::by_names(p.clone(), &["s<=t0", "s<=t1"]).unwrap();
        let v = z.complement().unwrap();
        assert_eq!(v.source.num_morphisms(), 3);
        assert!(decomposition_check(&p, &z, &v));
        let whole = Functor::identity(&p);
        assert!(!decomposition_check(&p, &z, &whole));
    }

    #[test]
    fn terminal_pair_gives_a2() {
        let e = Arc::new(FinCat::terminal());
        let s = SetBifunctor::new(
            e.clone(),
            e.clone(),
            vec![Elem { name: "s".into(), src: Obj(0), tgt: Obj(0) }],
            |_, x| x,
            |x, _| x,
        )
        .unwrap();
        let base = arrow_cat_base(&s);
        assert_eq!((base.cat.num_objects(), base.cat.num_morphisms()), (2, 3));
        assert!(base.cat.is_poset());
        assert_eq!(base.cat.obj_name(Obj(0)), "v:*");
    }

    #[test]
    fn cstar_adds_terminal_object() {
        let c = vposet();
        let e = Arc::new(FinCat::terminal());
        let elems = c
            .object_ids()
            .map(|o| Elem { name: format!("!{}", c.obj_name(o)), src: o, tgt: Obj(0) })
            .collect();
        let s = SetBifunctor::new(e, c.clone(), elems, |_, x| x, |_, f| c.src(f).0).unwrap();
        let base = arrow_cat_base(&s);
        let star = Obj(c.num_objects());
        for o in base.cat.object_ids() {
            assert_eq!(base.cat.hom(o, star).len(), 1);
        }
        let rec = recognize_arrow(&base.cat, &base.ideal()).unwrap();
        assert!(rec.iso.is_isomorphism());
    }

    #[test]
    fn composition_is_left_action() {
        let c = a2();
        let s = SetBifunctor::identity(&c);
        let base = arrow_cat_base(&s);
        for (e, el) in s.elems().iter().enumerate() {
            for &g in c.out_mors(el.tgt) {
                let composite = base.cat.compose(base.incl_u.mor(g), base.cross[e]).unwrap();
                assert_eq!(composite, base.cross[s.act_left(g, e)]);
            }
        }
    }

    #[test]
    fn recognize_a2() {
        let c = a2();
        let s = Ideal::by_names(c.clone(), &["0<=1"]).unwrap();
        let rec = recognize_arrow(&c, &s).unwrap();
        assert_eq!(rec.incl_u.source.object_names(), &["1".to_string()]);
        assert_eq!(rec.incl_v.source.object_names(), &["0".to_string()]);
        assert!(rec.iso.is_isomorphism());
    }

    #[test]
    fn long_composite_leaves_middle_uncovered() {
        let c = Arc::new(FinCat::chain(2));
        let s = Ideal::by_names(c.clone(), &["0<=2"]).unwrap();
        assert!(s.is_thin());
        match recognize_arrow(&c, &s) {
            Err(ArrowError::ObjectsNotCovered(o)) => assert_eq!(o, vec!["1".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extra_cross_and_not_thin() {
        // 0 → 1 → 2 with ideal {1<=2, 0<=2}: not thin
        let c = Arc::new(FinCat::chain(2));
        let s = Ideal::by_names(c.clone(), &["0<=2", "1<=2"]).unwrap();
        assert!(matches!(recognize_arrow(&c, &s), Ok(_)));
        let fat = Ideal::by_names(c.clone(), &["0<=1", "0<=2", "1<=2"]).unwrap();
        assert!(matches!(recognize_arrow(&c, &fat), Err(ArrowError::NotThin { .. })));
        // two parallel arrows a ⇉ b, ideal only one of them
        let q = Arc::new(FinCat::free_on_dag(&["a", "b"], &[("f", "a", "b"), ("g", "a", "b")]).unwrap());
        let half = Ideal::by_names(q.clone(), &["f"]).unwrap();
        assert!(matches!(recognize_arrow(&q, &half), Err(ArrowError::ExtraCrossMorphisms(m)) if m == vec!["g".to_string()]));
    }

    #[test]
    fn chain_covers() {
        let p = vposet();
        let cc = chain_cover(&p).unwrap();
        assert_eq!(cc.chains.len(), 2);
        assert_eq!(cc.intersections.len(), 1);
        assert_eq!(cc.intersections[0].2.source.object_names(), &["s".to_string()]);
        assert!(is_n_cover(&p, &cc.chains, CoverDegree::Infinite { depth: 8 }).covered);

        let a = a2();
        assert_eq!(chain_cover(&a).unwrap().chains.len(), 1);

        let grid = Arc::new(
            FinCat::poset(
                &["00", "01", "10", "11"],
                &[("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")],
            )
            .unwrap(),
        );
        let cc = chain_cover(&grid).unwrap();
        // brute force: maximal totally ordered subsets
        let mut maximal = Vec::new();
        let n = grid.num_objects();
        let total = |mask: usize| {
            (0..n).all(|i| {
                (0..n).all(|j| {
                    mask & (1 << i) == 0
                        || mask & (1 << j) == 0
                        || !grid.hom(Obj(i), Obj(j)).is_empty()
                        || !grid.hom(Obj(j), Obj(i)).is_empty()
                })
            })
        };
        for mask in 1..(1usize << n) {
            if total(mask) && (0..n).all(|k| mask & (1 << k) != 0 || !total(mask | (1 << k))) {
                maximal.push(mask);
            }
        }
        assert_eq!(cc.chains.len(), maximal.len());
        assert!(cc.chain_objects.iter().all(|c| c.len() == 3));
        let meet = &cc.intersections[0].2.source;
        assert_eq!(meet.object_names(), &["00".to_string(), "11".to_string()]);
        assert_eq!(meet.num_morphisms(), 3);
    }

    #[test]
    fn chain_cover_rejects_non_posets() {
        let q = Arc::new(FinCat::free_on_dag(&["a", "b"], &[("f", "a", "b"), ("g", "a", "b")]).unwrap());
        assert!(matches!(chain_cover(&q), Err(ArrowError::NotPoset(_))));
    }
}
