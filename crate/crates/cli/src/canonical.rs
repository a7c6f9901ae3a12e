//! Canonical form of a workspace: every category, functor, bifunctor, graded
//! category, graded functor, bimodule and cover as an explicit table.
//! Values reached only through other declarations get names derived from
//! their first user. Reloading the output and writing it again gives the
//! same bytes.

use std::sync::Arc;

use mapgraded::bimod::Bimodule;
use mapgraded::fincat::{CatRef, Functor, SetBifunctor};
use mapgraded::Q;

use crate::format::*;
use crate::workspace::{Decl, Item, Workspace, G, GF};

struct Registry<T, D> {
    entries: Vec<(String, Arc<T>)>,
    out: Vec<Option<D>>,
}

impl<T, D> Registry<T, D> {
    fn new() -> Self {
        Registry {
            entries: Vec::new(),
            out: Vec::new(),
        }
    }

    fn find(&self, x: &Arc<T>, same: impl Fn(&T, &T) -> bool) -> Option<usize> {
        self.entries
            .iter()
            .position(|(_, y)| Arc::ptr_eq(x, y))
            .or_else(|| self.entries.iter().position(|(_, y)| same(x, y)))
    }

    fn fresh_name(&self, hint: &str, taken: &dyn Fn(&str) -> bool) -> String {
        if !taken(hint) {
            return hint.to_string();
        }
        (2..).map(|i| format!("{hint}.{i}")).find(|n| !taken(n)).unwrap()
    }
}

struct Dumper<'a> {
    ws: &'a Workspace,
    cats: Registry<mapgraded::fincat::FinCat, CategoryDecl>,
    functors: Registry<Functor, FunctorDecl>,
    bifunctors: Registry<SetBifunctor, BifunctorDecl>,
    graded: Registry<G, GradedDecl>,
    gfunctors: Registry<GF, GradedFunctorDecl>,
    bimodules: Registry<Bimodule<Q>, BimoduleDecl>,
}

fn same_graded(a: &G, b: &G) -> bool {
    *a.base == *b.base && a.to_spec() == b.to_spec()
}

fn same_gfunctor(f: &GF, g: &GF) -> bool {
    same_graded(&f.source, &g.source)
        && same_graded(&f.target, &g.target)
        && f.base == g.base
        && f.obj_map() == g.obj_map()
        && f.homs() == g.homs()
}

impl<'a> Dumper<'a> {
    fn taken(&self, n: &str) -> bool {
        self.ws.decl(n).is_some()
            || self.cats.entries.iter().any(|e| e.0 == n)
            || self.functors.entries.iter().any(|e| e.0 == n)
            || self.bifunctors.entries.iter().any(|e| e.0 == n)
            || self.graded.entries.iter().any(|e| e.0 == n)
            || self.gfunctors.entries.iter().any(|e| e.0 == n)
            || self.bimodules.entries.iter().any(|e| e.0 == n)
    }

    fn cat(&mut self, c: &CatRef, hint: &str) -> String {
        if let Some(i) = self.cats.find(c, |x, y| x == y) {
            if self.cats.out[i].is_none() {
                self.cats.out[i] = Some(self.cat_table(i));
            }
            return self.cats.entries[i].0.clone();
        }
        let name = self.cats.fresh_name(hint, &|n| self.taken(n));
        self.cats.entries.push((name.clone(), c.clone()));
        self.cats.out.push(None);
        let i = self.cats.entries.len() - 1;
        self.cats.out[i] = Some(self.cat_table(i));
        name
    }

    fn cat_table(&self, i: usize) -> CategoryDecl {
        let (name, c) = &self.cats.entries[i];
        let spec = c.to_spec();
        CategoryDecl::Table {
            name: name.clone(),
            objects: spec.objects,
            morphisms: spec.morphisms,
            identities: spec.identities,
            compositions: spec.compositions,
        }
    }

    fn functor(&mut self, f: &Arc<Functor>, hint: &str) -> String {
        if let Some(i) = self.functors.find(f, |x, y| x == y) {
            if self.functors.out[i].is_none() {
                let d = self.functor_table(&self.functors.entries[i].0.clone(), f);
                self.functors.out[i] = Some(d);
            }
            return self.functors.entries[i].0.clone();
        }
        let name = self.functors.fresh_name(hint, &|n| self.taken(n));
        self.functors.entries.push((name.clone(), f.clone()));
        self.functors.out.push(None);
        let d = self.functor_table(&name, f);
        *self.functors.out.last_mut().unwrap() = Some(d);
        name
    }

    fn functor_table(&mut self, name: &str, f: &Functor) -> FunctorDecl {
        let (s, t) = (&f.source, &f.target);
        FunctorDecl::Table {
            name: name.to_string(),
            source: self.cat(s, &format!("{name}.source")),
            target: self.cat(t, &format!("{name}.target")),
            objects: s
                .object_ids()
                .map(|o| (s.obj_name(o).to_string(), t.obj_name(f.obj(o)).to_string()))
                .collect(),
            morphisms: s
                .morphism_ids()
                .map(|m| (s.mor_name(m).to_string(), t.mor_name(f.mor(m)).to_string()))
                .collect(),
        }
    }

    fn bifunctor(&mut self, b: &Arc<SetBifunctor>, hint: &str) -> String {
        if let Some(i) = self.bifunctors.find(b, |x, y| x == y) {
            if self.bifunctors.out[i].is_none() {
                let d = self.bifunctor_table(&self.bifunctors.entries[i].0.clone(), b);
                self.bifunctors.out[i] = Some(d);
            }
            return self.bifunctors.entries[i].0.clone();
        }
        let name = self.bifunctors.fresh_name(hint, &|n| self.taken(n));
        self.bifunctors.entries.push((name.clone(), b.clone()));
        self.bifunctors.out.push(None);
        let d = self.bifunctor_table(&name, b);
        *self.bifunctors.out.last_mut().unwrap() = Some(d);
        name
    }

    fn bifunctor_table(&mut self, name: &str, b: &SetBifunctor) -> BifunctorDecl {
        let (l, r) = (&b.left, &b.right);
        let elems = b.elems();
        let mut left_action = Vec::new();
        for u in l.morphism_ids().filter(|&u| !l.is_identity(u)) {
            for (s, e) in elems.iter().enumerate().filter(|(_, e)| e.tgt == l.src(u)) {
                let res = b.act_left(u, s);
                left_action.push((l.mor_name(u).to_string(), e.name.clone(), elems[res].name.clone()));
            }
        }
        let mut right_action = Vec::new();
        for (s, e) in elems.iter().enumerate() {
            for v in r.morphism_ids().filter(|&v| !r.is_identity(v) && r.tgt(v) == e.src) {
                let res = b.act_right(s, v);
                right_action.push((e.name.clone(), r.mor_name(v).to_string(), elems[res].name.clone()));
            }
        }
        BifunctorDecl::Table {
            name: name.to_string(),
            left: self.cat(l, &format!("{name}.left")),
            right: self.cat(r, &format!("{name}.right")),
            elems: elems
                .iter()
                .map(|e| (e.name.clone(), r.obj_name(e.src).to_string(), l.obj_name(e.tgt).to_string()))
                .collect(),
            left_action,
            right_action,
        }
    }

    fn graded(&mut self, a: &Arc<G>, hint: &str) -> String {
        if let Some(i) = self.graded.find(a, same_graded) {
            if self.graded.out[i].is_none() {
                let d = self.graded_table(&self.graded.entries[i].0.clone(), a);
                self.graded.out[i] = Some(d);
            }
            return self.graded.entries[i].0.clone();
        }
        let name = self.graded.fresh_name(hint, &|n| self.taken(n));
        self.graded.entries.push((name.clone(), a.clone()));
        self.graded.out.push(None);
        let d = self.graded_table(&name, a);
        *self.graded.out.last_mut().unwrap() = Some(d);
        name
    }

    fn graded_table(&mut self, name: &str, a: &Arc<G>) -> GradedDecl {
        let spec = a.to_spec();
        let elem = |(h, e): &(mapgraded::mapgraded::HomRef, String)| ElemRef {
            mor: h.mor.clone(),
            src: h.src.clone(),
            tgt: h.tgt.clone(),
            elem: e.clone(),
        };
        let coefs = |v: &[(String, Q)]| v.iter().map(|(n, q)| coef(n, q)).collect();
        GradedDecl::Table {
            name: name.to_string(),
            base: self.cat(&a.base, &format!("{name}.base")),
            objects: spec.objects,
            homs: spec
                .homs
                .iter()
                .map(|h| HomDecl {
                    mor: h.hom.mor.clone(),
                    src: h.hom.src.clone(),
                    tgt: h.hom.tgt.clone(),
                    basis: h.basis.clone(),
                })
                .collect(),
            products: spec
                .products
                .iter()
                .map(|p| ProductDecl {
                    left: elem(&p.left),
                    right: elem(&p.right),
                    result: coefs(&p.result),
                })
                .collect(),
            identities: spec
                .identities
                .iter()
                .map(|(o, v)| IdentityDecl {
                    object: o.clone(),
                    value: coefs(v),
                })
                .collect(),
        }
    }

    fn gfunctor(&mut self, f: &Arc<GF>, hint: &str) -> String {
        if let Some(i) = self.gfunctors.find(f, same_gfunctor) {
            if self.gfunctors.out[i].is_none() {
                let d = self.gfunctor_table(&self.gfunctors.entries[i].0.clone(), f);
                self.gfunctors.out[i] = Some(d);
            }
            return self.gfunctors.entries[i].0.clone();
        }
        let name = self.gfunctors.fresh_name(hint, &|n| self.taken(n));
        self.gfunctors.entries.push((name.clone(), f.clone()));
        self.gfunctors.out.push(None);
        let d = self.gfunctor_table(&name, f);
        *self.gfunctors.out.last_mut().unwrap() = Some(d);
        name
    }

    fn gfunctor_table(&mut self, name: &str, f: &GF) -> GradedFunctorDecl {
        let (s, t) = (&f.source, &f.target);
        let source = self.graded(s, &format!("{name}.source"));
        let target = self.graded(t, &format!("{name}.target"));
        let base = self.functor(&Arc::new(f.base.clone()), &format!("{name}.base"));
        let homs = s
            .sharp_cat()
            .morphism_ids()
            .filter(|&m| s.dim(m) > 0)
            .map(|m| {
                let (u, x, y) = s.key(m);
                HomMapDecl {
                    mor: s.base.mor_name(u).to_string(),
                    src: s.obj_name(x).to_string(),
                    tgt: s.obj_name(y).to_string(),
                    matrix: f
                        .hom(m)
                        .to_dense()
                        .iter()
                        .map(|row| row.iter().map(show_rational).collect())
                        .collect(),
                }
            })
            .collect();
        GradedFunctorDecl::Table {
            name: name.to_string(),
            source,
            target,
            base,
            objects: (0..s.num_objects())
                .map(|x| (s.obj_name(x).to_string(), t.obj_name(f.obj(x)).to_string()))
                .collect(),
            homs,
        }
    }

    fn bimodule(&mut self, m: &Arc<Bimodule<Q>>, hint: &str) -> String {
        if let Some(i) = self.bimodules.find(m, |_, _| false) {
            if self.bimodules.out[i].is_none() {
                let d = self.bimodule_table(&self.bimodules.entries[i].0.clone(), m);
                self.bimodules.out[i] = Some(d);
            }
            return self.bimodules.entries[i].0.clone();
        }
        let name = self.bimodules.fresh_name(hint, &|n| self.taken(n));
        self.bimodules.entries.push((name.clone(), m.clone()));
        self.bimodules.out.push(None);
        let d = self.bimodule_table(&name, m);
        *self.bimodules.out.last_mut().unwrap() = Some(d);
        name
    }

    fn bimodule_table(&mut self, name: &str, m: &Bimodule<Q>) -> BimoduleDecl {
        let (a, b, s) = (&m.left, &m.right, &m.carrier);
        let left = self.graded(a, &format!("{name}.left"));
        let right = self.graded(b, &format!("{name}.right"));
        let carrier = self.bifunctor(s, &format!("{name}.carrier"));
        let raw = m.to_raw();
        let space_ref = |k: &(usize, usize, usize)| SpaceRef {
            elem: s.elem(k.0).name.clone(),
            from: b.obj_name(k.1).to_string(),
            to: a.obj_name(k.2).to_string(),
        };
        let basis = |k: &(usize, usize, usize)| raw.bases.get(k).cloned().unwrap_or_default();
        let elem_ref = |g: &G, h, i: usize| {
            let (u, x, y) = g.key(h);
            ElemRef {
                mor: g.base.mor_name(u).to_string(),
                src: g.obj_name(x).to_string(),
                tgt: g.obj_name(y).to_string(),
                elem: g.basis(h)[i].clone(),
            }
        };
        let mut keys: Vec<_> = raw.bases.keys().copied().collect();
        keys.sort();
        let spaces = keys
            .iter()
            .map(|k| {
                let r = space_ref(k);
                SpaceDecl {
                    elem: r.elem,
                    from: r.from,
                    to: r.to,
                    basis: basis(k),
                }
            })
            .collect();
        let mut lk: Vec<_> = raw.left_act.keys().copied().collect();
        lk.sort();
        let left_action = lk
            .iter()
            .map(|&(g, i, k, j)| {
                let (u, _, y) = a.key(g);
                let t = (s.act_left(u, k.0), k.1, y);
                let tb = basis(&t);
                ActionDecl {
                    hom: elem_ref(a, g, i),
                    space: space_ref(&k),
                    vec: basis(&k)[j].clone(),
                    result: raw.left_act[&(g, i, k, j)].iter().map(|(r, q)| coef(&tb[*r], q)).collect(),
                }
            })
            .collect();
        let mut rk: Vec<_> = raw.right_act.keys().copied().collect();
        rk.sort();
        let right_action = rk
            .iter()
            .map(|&(k, j, h, i)| {
                let (v, x, _) = b.key(h);
                let t = (s.act_right(k.0, v), x, k.2);
                let tb = basis(&t);
                ActionDecl {
                    hom: elem_ref(b, h, i),
                    space: space_ref(&k),
                    vec: basis(&k)[j].clone(),
                    result: raw.right_act[&(k, j, h, i)].iter().map(|(r, q)| coef(&tb[*r], q)).collect(),
                }
            })
            .collect();
        BimoduleDecl::Table {
            name: name.to_string(),
            left,
            right,
            carrier,
            spaces,
            left_action,
            right_action,
        }
    }
}

pub fn canonical(ws: &Workspace) -> WorkspaceFile {
    let mut d = Dumper {
        ws,
        cats: Registry::new(),
        functors: Registry::new(),
        bifunctors: Registry::new(),
        graded: Registry::new(),
        gfunctors: Registry::new(),
        bimodules: Registry::new(),
    };
    // Declared values first, so that references resolve to declared names.
    for (name, _) in ws.declarations() {
        match ws.item(name).expect("resolved") {
            Item::Category(c) => {
                d.cats.entries.push((name.to_string(), c.clone()));
                d.cats.out.push(None);
            }
            Item::Functor(f) => {
                d.functors.entries.push((name.to_string(), f.clone()));
                d.functors.out.push(None);
            }
            Item::Bifunctor(b) => {
                d.bifunctors.entries.push((name.to_string(), b.clone()));
                d.bifunctors.out.push(None);
            }
            Item::Graded(a) => {
                d.graded.entries.push((name.to_string(), a.clone()));
                d.graded.out.push(None);
            }
            Item::GradedFunctor(f) => {
                d.gfunctors.entries.push((name.to_string(), f.clone()));
                d.gfunctors.out.push(None);
            }
            Item::Bimodule(m) => {
                d.bimodules.entries.push((name.to_string(), m.clone()));
                d.bimodules.out.push(None);
            }
            _ => {}
        }
    }
    let mut file = WorkspaceFile::default();
    for (name, decl) in ws.declarations() {
        match (ws.item(name).expect("resolved"), decl) {
            (Item::Category(c), _) => {
                d.cat(c, name);
            }
            (Item::Functor(f), _) => {
                d.functor(f, name);
            }
            (Item::Bifunctor(b), _) => {
                d.bifunctor(b, name);
            }
            (Item::Graded(a), _) => {
                d.graded(a, name);
            }
            (Item::GradedFunctor(f), _) => {
                d.gfunctor(f, name);
            }
            (Item::Bimodule(m), _) => {
                d.bimodule(m, name);
            }
            (Item::Pseudofunctor(_), Decl::Pseudo(p)) => file.pseudofunctors.push(p.clone()),
            (Item::Diagram(_), Decl::Diagram(g)) => file.diagrams.push(g.clone()),
            (Item::Cover(c), _) => {
                let target = d.graded(&c.target, &format!("{name}.target"));
                let legs = c
                    .legs
                    .iter()
                    .enumerate()
                    .map(|(i, l)| d.gfunctor(&Arc::new(l.clone()), &format!("{name}.leg{i}")))
                    .collect();
                file.covers.push(CoverDecl::Table {
                    name: name.to_string(),
                    target,
                    legs,
                });
            }
            _ => unreachable!("item kinds follow declaration kinds"),
        }
    }
    file.categories = d.cats.out.into_iter().flatten().collect();
    file.functors = d.functors.out.into_iter().flatten().collect();
    file.bifunctors = d.bifunctors.out.into_iter().flatten().collect();
    file.graded = d.graded.out.into_iter().flatten().collect();
    file.graded_functors = d.gfunctors.out.into_iter().flatten().collect();
    file.bimodules = d.bimodules.out.into_iter().flatten().collect();
    file
}

pub fn canonical_json(ws: &Workspace) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(ws)).expect("serializable");
    s.push('\n');
    s
}
