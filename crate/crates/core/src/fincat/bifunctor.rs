use std::collections::HashMap;

use thiserror::Error;

use super::{CatRef, Functor, Mor, Obj};

/// Element `s ∈ S(V, U)`: `src` is an object of the right category `V`,
/// `tgt` an object of the left category `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BifunctorError {
    #[error("element {0} has an endpoint outside its category")]
    BadElement(String),
    #[error("action {0} lands in the wrong component")]
    Endpoints(String),
    #[error("identity does not act trivially on {0}")]
    Unit(String),
    #[error("action not associative: {0}")]
    Associativity(String),
}

/// A `U`-`V`-bifunctor `S: V^op × U → Set` with finite values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetBifunctor {
    pub left: CatRef,
    pub right: CatRef,
    elems: Vec<Elem>,
    left_act: Vec<Option<usize>>,
    right_act: Vec<Option<usize>>,
    between: HashMap<(Obj, Obj), Vec<usize>>,
}

impl SetBifunctor {
    /// `left_act(u, s) = u·s` is queried for `tgt(s) = src(u)` and
    /// `right_act(s, v) = s·v` for `tgt(v) = src(s)`.
    pub fn new(
        left: CatRef,
        right: CatRef,
        elems: Vec<Elem>,
        left_act: impl Fn(Mor, usize) -> usize,
        right_act: impl Fn(usize, Mor) -> usize,
    ) -> Result<SetBifunctor, BifunctorError> {
        let ne = elems.len();
        for e in &elems {
            if e.src.0 >= right.num_objects() || e.tgt.0 >= left.num_objects() {
                return Err(BifunctorError::BadElement(e.name.clone()));
            }
        }
        let mut la = vec![None; left.num_morphisms() * ne];
        for u in left.morphism_ids() {
            for (s, e) in elems.iter().enumerate() {
                if e.tgt == left.src(u) {
                    let r = left_act(u, s);
                    if r >= ne || elems[r].src != e.src || elems[r].tgt != left.tgt(u) {
                        return Err(BifunctorError::Endpoints(format!(
                            "{}·{}",
                            left.mor_name(u),
                            e.name
                        )));
                    }
                    la[u.0 * ne + s] = Some(r);
                }
            }
        }
        let nv = right.num_morphisms();
        let mut ra = vec![None; ne * nv];
        for (s, e) in elems.iter().enumerate() {
            for v in right.morphism_ids() {
                if right.tgt(v) == e.src {
                    let r = right_act(s, v);
                    if r >= ne || elems[r].tgt != e.tgt || elems[r].src != right.src(v) {
                        return Err(BifunctorError::Endpoints(format!(
                            "{}·{}",
                            e.name,
                            right.mor_name(v)
                        )));
                    }
                    ra[s * nv + v.0] = Some(r);
                }
            }
        }
        let mut between: HashMap<(Obj, Obj), Vec<usize>> = HashMap::new();
        for (i, e) in elems.iter().enumerate() {
            between.entry((e.src, e.tgt)).or_default().push(i);
        }
        let s = SetBifunctor {
            left,
            right,
            elems,
            left_act: la,
            right_act: ra,
            between,
        };
        s.check_axioms()?;
        Ok(s)
    }

    fn check_axioms(&self) -> Result<(), BifunctorError> {
        let (l, r) = (&self.left, &self.right);
        for (s, e) in self.elems.iter().enumerate() {
            if self.act_left(l.id(e.tgt), s) != s || self.act_right(s, r.id(e.src)) != s {
                return Err(BifunctorError::Unit(e.name.clone()));
            }
            for &u in l.out_mors(e.tgt) {
                let us = self.act_left(u, s);
                for &u2 in l.out_mors(l.tgt(u)) {
                    if self.act_left(u2, us) != self.act_left(l.compose(u2, u).unwrap(), s) {
                        return Err(BifunctorError::Associativity(format!(
                            "{}·({}·{})",
                            l.mor_name(u2),
                            l.mor_name(u),
                            e.name
                        )));
                    }
                }
            }
            for v in r.morphism_ids().filter(|&v| r.tgt(v) == e.src) {
                let sv = self.act_right(s, v);
                for v2 in r.morphism_ids().filter(|&v2| r.tgt(v2) == r.src(v)) {
                    if self.act_right(sv, v2) != self.act_right(s, r.compose(v, v2).unwrap()) {
                        return Err(BifunctorError::Associativity(format!(
                            "({}·{})·{}",
                            e.name,
                            r.mor_name(v),
                            r.mor_name(v2)
                        )));
                    }
                }
                for &u in l.out_mors(e.tgt) {
                    if self.act_left(u, sv) != self.act_right(self.act_left(u, s), v) {
                        return Err(BifunctorError::Associativity(format!(
                            "{}·{}·{}",
                            l.mor_name(u),
                            e.name,
                            r.mor_name(v)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The identity bifunctor `1_U`; elements are the morphisms of `U`.
    pub fn identity(c: &CatRef) -> SetBifunctor {
        let elems = c
            .morphism_ids()
            .map(|m| Elem {
                name: c.mor_name(m).to_string(),
                src: c.src(m),
                tgt: c.tgt(m),
            })
            .collect();
        SetBifunctor::new(
            c.clone(),
            c.clone(),
            elems,
            |u, s| c.compose(u, Mor(s)).unwrap().0,
            |s, v| c.compose(Mor(s), v).unwrap().0,
        )
        .expect("identity bifunctor")
    }

    /// `S_φ(V, U) = U(φ(V), U)` for `φ: V → U`; a `U`-`V`-bifunctor.
    /// Elements are listed by `V` object, then morphism of `U`.
    pub fn lower(phi: &Functor) -> SetBifunctor {
        let (v, u) = (&phi.source, &phi.target);
        let mut elems = Vec::new();
        let mut index = HashMap::new();
        for b in v.object_ids() {
            for &m in u.out_mors(phi.obj(b)) {
                index.insert((b, m), elems.len());
                elems.push((b, m));
            }
        }
        let named = elems
            .iter()
            .map(|&(b, m)| Elem {
                name: format!("{}:{}", v.obj_name(b), u.mor_name(m)),
                src: b,
                tgt: u.tgt(m),
            })
            .collect();
        let e2 = elems.clone();
        SetBifunctor::new(
            u.clone(),
            v.clone(),
            named,
            |g, s| index[&(e2[s].0, u.compose(g, e2[s].1).unwrap())],
            |s, h| index[&(v.src(h), u.compose(elems[s].1, phi.mor(h)).unwrap())],
        )
        .expect("bifunctor of a functor")
    }

    /// `S^φ(V, U) = V(V, φ(U))` for `φ: U → V`; a `U`-`V`-bifunctor.
    /// Elements are listed by `U` object, then morphism of `V`.
    pub fn upper(phi: &Functor) -> SetBifunctor {
        let (u, v) = (&phi.source, &phi.target);
        let mut elems = Vec::new();
        let mut index = HashMap::new();
        for a in u.object_ids() {
            for m in v.hom_into(phi.obj(a)) {
                index.insert((a, m), elems.len());
                elems.push((a, m));
            }
        }
        let named = elems
            .iter()
            .map(|&(a, m)| Elem {
                name: format!("{}:{}", v.mor_name(m), u.obj_name(a)),
                src: v.src(m),
                tgt: a,
            })
            .collect();
        let e2 = elems.clone();
        SetBifunctor::new(
            u.clone(),
            v.clone(),
            named,
            |g, s| index[&(u.tgt(g), v.compose(phi.mor(g), e2[s].1).unwrap())],
            |s, h| index[&(elems[s].0, v.compose(elems[s].1, h).unwrap())],
        )
        .expect("bifunctor of a functor")
    }

    pub fn num_elems(&self) -> usize {
        self.elems.len()
    }

    pub fn elem(&self, s: usize) -> &Elem {
        &self.elems[s]
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    /// `S(V, U)` for `V` in the right and `U` in the left category.
    pub fn between(&self, v: Obj, u: Obj) -> &[usize] {
        self.between.get(&(v, u)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn act_left(&self, u: Mor, s: usize) -> usize {
        self.left_act[u.0 * self.elems.len() + s].expect("left action on incompatible pair")
    }

    pub fn act_right(&self, s: usize, v: Mor) -> usize {
        self.right_act[s * self.right.num_morphisms() + v.0]
            .expect("right action on incompatible pair")
    }

    pub fn find_elem(&self, name: &str) -> Option<usize> {
        self.elems.iter().position(|e| e.name == name)
    }

    /// `self ∘ other` for `self` a `U`-`V`- and `other` a `V`-`W`-bifunctor:
    /// pairs `(s, t)` modulo `(s·v, t) ∼ (s, v·t)`.
    pub fn compose(&self, other: &SetBifunctor) -> Composite {
        assert!(*self.right == *other.left, "composition across different categories");
        let mid = &self.right;
        let mut pairs = Vec::new();
        let mut index = HashMap::new();
        for (s, es) in self.elems.iter().enumerate() {
            for (t, et) in other.elems.iter().enumerate() {
                if et.tgt == es.src {
                    index.insert((s, t), pairs.len());
                    pairs.push((s, t));
                }
            }
        }
        let mut parent: Vec<usize> = (0..pairs.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for (s, es) in self.elems.iter().enumerate() {
            for v in mid.morphism_ids().filter(|&v| mid.tgt(v) == es.src) {
                let sv = self.act_right(s, v);
                for (t, et) in other.elems.iter().enumerate() {
                    if et.tgt == mid.src(v) {
                        let vt = other.act_left(v, t);
                        let a = find(&mut parent, index[&(sv, t)]);
                        let b = find(&mut parent, index[&(s, vt)]);
                        // keep the smaller index as root so classes are named by least member
                        let (lo, hi) = (a.min(b), a.max(b));
                        parent[hi] = lo;
                    }
                }
            }
        }
        let mut class_of_root = HashMap::new();
        let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut class_of = HashMap::new();
        for (i, &p) in pairs.iter().enumerate() {
            let r = find(&mut parent, i);
            let c = *class_of_root.entry(r).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[c].push(p);
            class_of.insert(p, c);
        }
        let elems: Vec<Elem> = members
            .iter()
            .map(|m| {
                let (s, t) = m[0];
                Elem {
                    name: format!("{}*{}", self.elems[s].name, other.elems[t].name),
                    src: other.elems[t].src,
                    tgt: self.elems[s].tgt,
                }
            })
            .collect();
        let bifunctor = SetBifunctor::new(
            self.left.clone(),
            other.right.clone(),
            elems,
            |u, c| {
                let (s, t) = members[c][0];
                class_of[&(self.act_left(u, s), t)]
            },
            |c, w| {
                let (s, t) = members[c][0];
                class_of[&(s, other.act_right(t, w))]
            },
        )
        .expect("composite bifunctor");
        Composite {
            bifunctor,
            class_of,
            members,
        }
    }
}

/// Result of [`SetBifunctor::compose`].
#[derive(Clone, Debug)]
pub struct Composite {
    pub bifunctor: SetBifunctor,
    /// Class of each composable pair `(s, t)`.
    pub class_of: HashMap<(usize, usize), usize>,
    /// Members of each class, least first.
    pub members: Vec<Vec<(usize, usize)>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCat;
    use std::sync::Arc;

    #[test]
    fn identity_composes_to_itself() {
        let c = Arc::new(FinCat::chain(2));
        let one = SetBifunctor::identity(&c);
        let comp = one.compose(&one);
        assert_eq!(comp.bifunctor.num_elems(), c.num_morphisms());
        for (i, m) in comp.members.iter().enumerate() {
            let (s, t) = m[0];
            let e = comp.bifunctor.elem(i);
            let composite = c.compose(Mor(s), Mor(t)).unwrap();
            assert_eq!((c.src(composite), c.tgt(composite)), (e.src, e.tgt));
            for &(s2, t2) in m {
                assert_eq!(c.compose(Mor(s2), Mor(t2)), Some(composite));
            }
        }
    }

    #[test]
    fn lower_and_upper_of_identity_match_hom_sets() {
        let c = Arc::new(FinCat::chain(2));
        let id = Functor::identity(&c);
        let lo = SetBifunctor::lower(&id);
        let up = SetBifunctor::upper(&id);
        assert_eq!(lo.num_elems(), c.num_morphisms());
        assert_eq!(up.num_elems(), c.num_morphisms());
        for a in c.object_ids() {
            for b in c.object_ids() {
                assert_eq!(lo.between(a, b).len(), c.hom(a, b).len());
                assert_eq!(up.between(a, b).len(), c.hom(a, b).len());
            }
        }
    }

    #[test]
    fn broken_action_is_rejected() {
        let c = Arc::new(FinCat::chain(1));
        let e = Arc::new(FinCat::terminal());
        // S(*, 0) = {a}, S(*, 1) = {b}; u·a must be b.
        let elems = vec![
            Elem { name: "a".into(), src: Obj(0), tgt: Obj(0) },
            Elem { name: "b".into(), src: Obj(0), tgt: Obj(1) },
        ];
        let u = c.find_morphism("0<=1").unwrap();
        let ok = SetBifunctor::new(c.clone(), e.clone(), elems.clone(), |g, s| if g == u { 1 } else { s }, |s, _| s);
        assert!(ok.is_ok());
        let bad = SetBifunctor::new(c.clone(), e, elems, |_, s| s, |s, _| s);
        assert!(matches!(bad, Err(BifunctorError::Endpoints(_))));
    }
}
