//! Finite categories, functors, nerves, covers, pullbacks, ideals and the
//! purely categorical arrow and chain constructions.

mod arrow;
mod bifunctor;
mod cover;
mod nerve;
mod pullback;

pub use arrow::{
    arrow_cat_base, chain_cover, decomposition_check, is_ideal, is_thin_ideal, recognize_arrow,
    ArrowBase, ArrowError, ArrowRecognition, ChainCover, Ideal,
};
pub use bifunctor::{BifunctorError, Composite, Elem, SetBifunctor};
pub use cover::{
    is_n_cover, is_n_injective, is_n_surjective, jointly_surjective_in_degree, CoverDegree,
    CoverVerdict,
};
pub use nerve::{nerve, nerve_count, NerveIndex, Simplex};
pub use pullback::{pullback_cat, CatPullback, PullbackError};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Object index into [`FinCat::objects`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(pub usize);

/// Morphism index in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mor(pub usize);

pub type CatRef = Arc<FinCat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorData {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// Unvalidated description of a finite category by names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinCatSpec {
    pub objects: Vec<String>,
    /// `(name, source, target)`, identities included.
    pub morphisms: Vec<(String, String, String)>,
    /// `(object, identity morphism)`.
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`.
    pub compositions: Vec<(String, String, String)>,
}

impl FinCatSpec {
    /// Adds the composites `1∘f = f` and `g∘1 = g` that are not listed yet.
    pub fn fill_identity_composites(&mut self) {
        let ids: HashMap<&str, &str> = self
            .identities
            .iter()
            .map(|(o, m)| (o.as_str(), m.as_str()))
            .collect();
        let listed: BTreeSet<(String, String)> = self
            .compositions
            .iter()
            .map(|(g, f, _)| (g.clone(), f.clone()))
            .collect();
        let mut extra = Vec::new();
        for (name, src, tgt) in &self.morphisms {
            if let Some(&i) = ids.get(tgt.as_str()) {
                if !listed.contains(&(i.to_string(), name.clone())) {
                    extra.push((i.to_string(), name.clone(), name.clone()));
                }
            }
            if let Some(&i) = ids.get(src.as_str()) {
                if i != name && !listed.contains(&(name.clone(), i.to_string())) {
                    extra.push((name.clone(), i.to_string(), name.clone()));
                }
            }
        }
        self.compositions.extend(extra);
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FinCatError {
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown morphism {0}")]
    UnknownMorphism(String),
    #[error("bad identity at object {object}: {reason}")]
    BadIdentity { object: String, reason: String },
    #[error("composite {g} o {f} listed but not composable")]
    NotComposable { g: String, f: String },
    #[error("composite {g} o {f} = {gf} has wrong endpoints")]
    CompositeEndpoints { g: String, f: String, gf: String },
    #[error("composite {g} o {f} listed twice with different values")]
    ConflictingComposite { g: String, f: String },
    #[error("missing composite {g} o {f}")]
    MissingComposite { g: String, f: String },
    #[error("composition not associative on ({h}, {g}, {f})")]
    NonAssociative { h: String, g: String, f: String },
}

/// A validated finite category.
#[derive(Clone, PartialEq, Eq)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<MorData>,
    identity: Vec<Mor>,
    comp: Vec<Option<Mor>>,
    out_mors: Vec<Vec<Mor>>,
    hom: HashMap<(Obj, Obj), Vec<Mor>>,
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinCat(objects: {:?}, morphisms: [", self.objects)?;
        for (i, m) in self.morphisms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{}: {} -> {}",
                m.name, self.objects[m.src.0], self.objects[m.tgt.0]
            )?;
        }
        write!(f, "])")
    }
}

impl FinCat {
    /// Validates a description; on failure returns every violated axiom found.
    pub fn validate(spec: &FinCatSpec) -> Result<FinCat, Vec<FinCatError>> {
        let mut errs = Vec::new();
        let mut obj_ix = HashMap::new();
        for (i, o) in spec.objects.iter().enumerate() {
            if obj_ix.insert(o.as_str(), Obj(i)).is_some() {
                errs.push(FinCatError::DuplicateName(o.clone()));
            }
        }
        let mut mor_ix = HashMap::new();
        let mut morphisms = Vec::new();
        for (name, s, t) in &spec.morphisms {
            let src = obj_ix.get(s.as_str()).copied();
            let tgt = obj_ix.get(t.as_str()).copied();
            for (o, r) in [(s, src), (t, tgt)] {
                if r.is_none() {
                    errs.push(FinCatError::UnknownObject(o.clone()));
                }
            }
            if mor_ix.insert(name.as_str(), Mor(morphisms.len())).is_some() {
                errs.push(FinCatError::DuplicateName(name.clone()));
            }
            morphisms.push(MorData {
                name: name.clone(),
                src: src.unwrap_or(Obj(0)),
                tgt: tgt.unwrap_or(Obj(0)),
            });
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let mut identity: Vec<Option<Mor>> = vec![None; spec.objects.len()];
        for (o, m) in &spec.identities {
            let Some(&oi) = obj_ix.get(o.as_str()) else {
                errs.push(FinCatError::UnknownObject(o.clone()));
                continue;
            };
            let Some(&mi) = mor_ix.get(m.as_str()) else {
                errs.push(FinCatError::UnknownMorphism(m.clone()));
                continue;
            };
            let d = &morphisms[mi.0];
            if d.src != oi || d.tgt != oi {
                errs.push(FinCatError::BadIdentity {
                    object: o.clone(),
                    reason: format!("{m} is not an endomorphism of {o}"),
                });
            } else if identity[oi.0].replace(mi).is_some() {
                errs.push(FinCatError::BadIdentity {
                    object: o.clone(),
                    reason: "declared twice".into(),
                });
            }
        }
        for (i, id) in identity.iter().enumerate() {
            if id.is_none() {
                errs.push(FinCatError::BadIdentity {
                    object: spec.objects[i].clone(),
                    reason: "no identity declared".into(),
                });
            }
        }
        let m = morphisms.len();
        let mut comp: Vec<Option<Mor>> = vec![None; m * m];
        for (g, f, gf) in &spec.compositions {
            let mut look = |n: &String| {
                let r = mor_ix.get(n.as_str()).copied();
                if r.is_none() {
                    errs.push(FinCatError::UnknownMorphism(n.clone()));
                }
                r
            };
            let (Some(gi), Some(fi), Some(gfi)) = (look(g), look(f), look(gf)) else {
                continue;
            };
            let (dg, df, dgf) = (&morphisms[gi.0], &morphisms[fi.0], &morphisms[gfi.0]);
            if df.tgt != dg.src {
                errs.push(FinCatError::NotComposable {
                    g: g.clone(),
                    f: f.clone(),
                });
            } else if dgf.src != df.src || dgf.tgt != dg.tgt {
                errs.push(FinCatError::CompositeEndpoints {
                    g: g.clone(),
                    f: f.clone(),
                    gf: gf.clone(),
                });
            } else {
                let slot = &mut comp[gi.0 * m + fi.0];
                if slot.is_some() && *slot != Some(gfi) {
                    errs.push(FinCatError::ConflictingComposite {
                        g: g.clone(),
                        f: f.clone(),
                    });
                }
                *slot = Some(gfi);
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let identity: Vec<Mor> = identity.into_iter().map(Option::unwrap).collect();
        let cat = FinCat::assemble(spec.objects.clone(), morphisms, identity, comp);
        let errs = cat.axiom_violations();
        if errs.is_empty() {
            Ok(cat)
        } else {
            Err(errs)
        }
    }

    pub(crate) fn assemble(
        objects: Vec<String>,
        morphisms: Vec<MorData>,
        identity: Vec<Mor>,
        comp: Vec<Option<Mor>>,
    ) -> FinCat {
        let mut out_mors = vec![Vec::new(); objects.len()];
        let mut hom: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        for (i, d) in morphisms.iter().enumerate() {
            out_mors[d.src.0].push(Mor(i));
            hom.entry((d.src, d.tgt)).or_default().push(Mor(i));
        }
        FinCat {
            objects,
            morphisms,
            identity,
            comp,
            out_mors,
            hom,
        }
    }

    pub(crate) fn axiom_violations(&self) -> Vec<FinCatError> {
        let mut errs = Vec::new();
        let name = |m: Mor| self.morphisms[m.0].name.clone();
        for g in self.morphism_ids() {
            for &f in self.hom_into(self.src(g)).iter() {
                if self.compose(g, f).is_none() {
                    errs.push(FinCatError::MissingComposite {
                        g: name(g),
                        f: name(f),
                    });
                }
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        for (o, &i) in self.identity.iter().enumerate() {
            let bad = self.morphism_ids().any(|f| {
                (self.tgt(f) == Obj(o) && self.compose(i, f) != Some(f))
                    || (self.src(f) == Obj(o) && self.compose(f, i) != Some(f))
            });
            if bad {
                errs.push(FinCatError::BadIdentity {
                    object: self.objects[o].clone(),
                    reason: format!("{} is not a two-sided unit", name(i)),
                });
            }
        }
        for f in self.morphism_ids() {
            for &g in self.out_mors(self.tgt(f)) {
                let gf = self.compose(g, f).unwrap();
                for &h in self.out_mors(self.tgt(g)) {
                    let hg = self.compose(h, g).unwrap();
                    if self.compose(h, gf) != self.compose(hg, f) {
                        errs.push(FinCatError::NonAssociative {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                    }
                }
            }
        }
        errs
    }

    /// Builds a category from a composition function, validating the result.
    pub fn from_fn(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: Vec<usize>,
        comp: impl Fn(usize, usize) -> usize,
    ) -> Result<FinCat, Vec<FinCatError>> {
        let mut spec = FinCatSpec {
            objects: objects.clone(),
            ..Default::default()
        };
        for (n, s, t) in &morphisms {
            spec.morphisms
                .push((n.clone(), objects[*s].clone(), objects[*t].clone()));
        }
        for (o, &i) in identity.iter().enumerate() {
            spec.identities
                .push((objects[o].clone(), morphisms[i].0.clone()));
        }
        for (gi, g) in morphisms.iter().enumerate() {
            for (fi, f) in morphisms.iter().enumerate() {
                if f.2 == g.1 {
                    spec.compositions.push((
                        g.0.clone(),
                        f.0.clone(),
                        morphisms[comp(gi, fi)].0.clone(),
                    ));
                }
            }
        }
        FinCat::validate(&spec)
    }

    /// The terminal category `e` with object `*`.
    pub fn terminal() -> FinCat {
        FinCat::poset(&["*"], &[]).unwrap()
    }

    /// The chain `0 → 1 → … → n`.
    pub fn chain(n: usize) -> FinCat {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let rel: Vec<(&str, &str)> = (0..n).map(|i| (refs[i], refs[i + 1])).collect();
        FinCat::poset(&refs, &rel).unwrap()
    }

    /// Discrete category on the given objects.
    pub fn discrete(objects: &[&str]) -> FinCat {
        FinCat::poset(objects, &[]).unwrap()
    }

    /// Poset category generated by the relations `a ≤ b` (reflexive-transitive
    /// closure). Identities are named `1_a`, other morphisms `a<=b`.
    /// Fails with the offending pair if the closure is not antisymmetric.
    pub fn poset(elements: &[&str], relations: &[(&str, &str)]) -> Result<FinCat, String> {
        let n = elements.len();
        let ix: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        if ix.len() != n {
            return Err("duplicate element".into());
        }
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
        }
        for (a, b) in relations {
            let (Some(&i), Some(&j)) = (ix.get(a), ix.get(b)) else {
                return Err(format!("unknown element in {a} <= {b}"));
            };
            le[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(format!("{} and {} form a cycle", elements[i], elements[j]));
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut at = HashMap::new();
        for i in 0..n {
            at.insert((i, i), morphisms.len());
            morphisms.push((format!("1_{}", elements[i]), i, i));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] {
                    at.insert((i, j), morphisms.len());
                    morphisms.push((format!("{}<={}", elements[i], elements[j]), i, j));
                }
            }
        }
        let srcs: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.1, m.2)).collect();
        FinCat::from_fn(
            elements.iter().map(|s| s.to_string()).collect(),
            morphisms,
            (0..n).collect(),
            |g, f| at[&(srcs[f].0, srcs[g].1)],
        )
        .map_err(|e| format!("{e:?}"))
    }

    /// Path category of a finite acyclic quiver; paths are named by joining
    /// arrow names with `.` (last arrow first).
    pub fn free_on_dag(objects: &[&str], arrows: &[(&str, &str, &str)]) -> Result<FinCat, String> {
        let ix: HashMap<&str, usize> = objects.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut paths: Vec<(Vec<usize>, usize, usize)> =
            (0..objects.len()).map(|i| (Vec::new(), i, i)).collect();
        let edges: Vec<(usize, usize)> = arrows
            .iter()
            .map(|(_, s, t)| {
                Ok((
                    *ix.get(s).ok_or(format!("unknown {s}"))?,
                    *ix.get(t).ok_or(format!("unknown {t}"))?,
                ))
            })
            .collect::<Result<_, String>>()?;
        let mut frontier: Vec<usize> = (0..objects.len()).collect();
        let mut rounds = 0;
        while !frontier.is_empty() {
            rounds += 1;
            if rounds > objects.len() + 1 {
                return Err("quiver has a cycle".into());
            }
            let mut next = Vec::new();
            for p in frontier {
                for (e, &(s, t)) in edges.iter().enumerate() {
                    if s == paths[p].2 {
                        let mut w = paths[p].0.clone();
                        w.push(e);
                        next.push(paths.len());
                        paths.push((w, paths[p].1, t));
                    }
                }
            }
            frontier = next;
        }
        let index: HashMap<Vec<usize>, usize> =
            paths.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        let morphisms: Vec<(String, usize, usize)> = paths
            .iter()
            .map(|(w, s, t)| {
                let name = if w.is_empty() {
                    format!("1_{}", objects[*s])
                } else {
                    w.iter().rev().map(|&e| arrows[e].0).collect::<Vec<_>>().join(".")
                };
                (name, *s, *t)
            })
            .collect();
        let words: Vec<Vec<usize>> = paths.iter().map(|p| p.0.clone()).collect();
        FinCat::from_fn(
            objects.iter().map(|s| s.to_string()).collect(),
            morphisms,
            (0..objects.len()).collect(),
            |g, f| {
                if words[f].is_empty() {
                    return g;
                }
                if words[g].is_empty() {
                    return f;
                }
                let mut w = words[f].clone();
                w.extend(&words[g]);
                index[&w]
            },
        )
        .map_err(|e| format!("{e:?}"))
    }

    /// Renames objects and morphisms (same shape), validating uniqueness.
    pub fn renamed(
        &self,
        obj: impl Fn(Obj) -> String,
        mor: impl Fn(Mor) -> String,
    ) -> FinCat {
        let objects = self.object_ids().map(&obj).collect();
        let morphisms = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, d)| MorData {
                name: mor(Mor(i)),
                src: d.src,
                tgt: d.tgt,
            })
            .collect();
        FinCat::assemble(objects, morphisms, self.identity.clone(), self.comp.clone())
    }

    pub fn to_spec(&self) -> FinCatSpec {
        let mut spec = FinCatSpec {
            objects: self.objects.clone(),
            ..Default::default()
        };
        for d in &self.morphisms {
            spec.morphisms.push((
                d.name.clone(),
                self.objects[d.src.0].clone(),
                self.objects[d.tgt.0].clone(),
            ));
        }
        for (o, i) in self.identity.iter().enumerate() {
            spec.identities
                .push((self.objects[o].clone(), self.mor_name(*i).to_string()));
        }
        for g in self.morphism_ids() {
            for f in self.morphism_ids() {
                if let Some(gf) = self.compose(g, f) {
                    spec.compositions.push((
                        self.mor_name(g).to_string(),
                        self.mor_name(f).to_string(),
                        self.mor_name(gf).to_string(),
                    ));
                }
            }
        }
        spec
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = Obj> {
        (0..self.objects.len()).map(Obj)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = Mor> {
        (0..self.morphisms.len()).map(Mor)
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn obj_name(&self, o: Obj) -> &str {
        &self.objects[o.0]
    }

    pub fn mor_name(&self, m: Mor) -> &str {
        &self.morphisms[m.0].name
    }

    pub fn find_object(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name).map(Obj)
    }

    pub fn find_morphism(&self, name: &str) -> Option<Mor> {
        self.morphisms.iter().position(|m| m.name == name).map(Mor)
    }

    pub fn src(&self, m: Mor) -> Obj {
        self.morphisms[m.0].src
    }

    pub fn tgt(&self, m: Mor) -> Obj {
        self.morphisms[m.0].tgt
    }

    pub fn id(&self, o: Obj) -> Mor {
        self.identity[o.0]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity[self.src(m).0] == m
    }

    /// `g ∘ f`, defined iff `tgt(f) = src(g)`.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.comp[g.0 * self.morphisms.len() + f.0]
    }

    /// Composite of a path given first-morphism-first.
    pub fn compose_path(&self, path: &[Mor]) -> Option<Mor> {
        let (first, rest) = path.split_first()?;
        rest.iter()
            .try_fold(*first, |acc, &g| self.compose(g, acc))
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        self.hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_mors(&self, a: Obj) -> &[Mor] {
        &self.out_mors[a.0]
    }

    pub fn hom_into(&self, b: Obj) -> Vec<Mor> {
        self.morphism_ids().filter(|&m| self.tgt(m) == b).collect()
    }

    /// At most one morphism between any two objects and no two-way homs
    /// between distinct objects.
    pub fn is_poset(&self) -> bool {
        self.object_ids().all(|a| {
            self.object_ids().all(|b| {
                let n = self.hom(a, b).len();
                n <= 1 && (a == b || n == 0 || self.hom(b, a).is_empty())
            })
        })
    }

    /// No morphisms both ways between distinct objects, and only identities
    /// as endomorphisms.
    pub fn is_delta(&self) -> bool {
        self.object_ids().all(|a| {
            self.hom(a, a).len() == 1
                && self
                    .object_ids()
                    .all(|b| a == b || self.hom(a, b).is_empty() || self.hom(b, a).is_empty())
        })
    }

    /// Subcategory on the given morphisms (their endpoints and identities are
    /// added). Fails with a composable pair whose composite is missing.
    pub fn subcategory(&self, mors: &[Mor]) -> Result<(FinCat, Vec<Obj>, Vec<Mor>), (Mor, Mor)> {
        let mut keep: BTreeSet<Mor> = mors.iter().copied().collect();
        for &m in mors {
            keep.insert(self.id(self.src(m)));
            keep.insert(self.id(self.tgt(m)));
        }
        for &g in &keep {
            for &f in &keep {
                if let Some(gf) = self.compose(g, f) {
                    if !keep.contains(&gf) {
                        return Err((g, f));
                    }
                }
            }
        }
        Ok(self.sub_on(&keep))
    }

    /// Smallest subcategory containing the given morphisms and objects.
    pub fn generated_subcategory(
        &self,
        objs: &[Obj],
        mors: &[Mor],
    ) -> (FinCat, Vec<Obj>, Vec<Mor>) {
        let mut keep: BTreeSet<Mor> = mors.iter().copied().collect();
        for &o in objs {
            keep.insert(self.id(o));
        }
        for &m in mors {
            keep.insert(self.id(self.src(m)));
            keep.insert(self.id(self.tgt(m)));
        }
        loop {
            let mut add = Vec::new();
            for &g in &keep {
                for &f in &keep {
                    if let Some(gf) = self.compose(g, f) {
                        if !keep.contains(&gf) {
                            add.push(gf);
                        }
                    }
                }
            }
            if add.is_empty() {
                break;
            }
            keep.extend(add);
        }
        self.sub_on(&keep)
    }

    /// Full subcategory on the given objects.
    pub fn full_subcategory(&self, objs: &[Obj]) -> (FinCat, Vec<Obj>, Vec<Mor>) {
        let set: BTreeSet<Obj> = objs.iter().copied().collect();
        let keep: BTreeSet<Mor> = self
            .morphism_ids()
            .filter(|&m| set.contains(&self.src(m)) && set.contains(&self.tgt(m)))
            .collect();
        self.sub_on(&keep)
    }

    /// `keep` must be closed under composition and contain identities.
    fn sub_on(&self, keep: &BTreeSet<Mor>) -> (FinCat, Vec<Obj>, Vec<Mor>) {
        let objs: Vec<Obj> = self
            .object_ids()
            .filter(|&o| keep.contains(&self.id(o)))
            .collect();
        let mors: Vec<Mor> = keep.iter().copied().collect();
        let oix: HashMap<Obj, usize> = objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mix: HashMap<Mor, usize> = mors.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let morphisms = mors
            .iter()
            .map(|&m| MorData {
                name: self.mor_name(m).to_string(),
                src: Obj(oix[&self.src(m)]),
                tgt: Obj(oix[&self.tgt(m)]),
            })
            .collect();
        let identity = objs.iter().map(|&o| Mor(mix[&self.id(o)])).collect();
        let n = mors.len();
        let mut comp = vec![None; n * n];
        for (gi, &g) in mors.iter().enumerate() {
            for (fi, &f) in mors.iter().enumerate() {
                if let Some(gf) = self.compose(g, f) {
                    comp[gi * n + fi] = Some(Mor(mix[&gf]));
                }
            }
        }
        let cat = FinCat::assemble(
            objs.iter().map(|&o| self.obj_name(o).to_string()).collect(),
            morphisms,
            identity,
            comp,
        );
        (cat, objs, mors)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FunctorError {
    #[error("object map has length {found}, expected {expected}")]
    ObjectMapLength { expected: usize, found: usize },
    #[error("morphism map has length {found}, expected {expected}")]
    MorphismMapLength { expected: usize, found: usize },
    #[error("morphism {0} is sent to a morphism with wrong endpoints")]
    Endpoints(String),
    #[error("identity of {0} is not preserved")]
    Identity(String),
    #[error("composite {g} o {f} is not preserved")]
    Composition { g: String, f: String },
    #[error("no morphism or object named {0} in the target")]
    Missing(String),
}

/// A functor between finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub source: CatRef,
    pub target: CatRef,
    obj_map: Vec<Obj>,
    mor_map: Vec<Mor>,
}

impl Functor {
    pub fn new(
        source: CatRef,
        target: CatRef,
        obj_map: Vec<Obj>,
        mor_map: Vec<Mor>,
    ) -> Result<Functor, FunctorError> {
        if obj_map.len() != source.num_objects() {
            return Err(FunctorError::ObjectMapLength {
                expected: source.num_objects(),
                found: obj_map.len(),
            });
        }
        if mor_map.len() != source.num_morphisms() {
            return Err(FunctorError::MorphismMapLength {
                expected: source.num_morphisms(),
                found: mor_map.len(),
            });
        }
        let f = Functor {
            source,
            target,
            obj_map,
            mor_map,
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), FunctorError> {
        let (s, t) = (&self.source, &self.target);
        for m in s.morphism_ids() {
            let fm = self.mor(m);
            if t.src(fm) != self.obj(s.src(m)) || t.tgt(fm) != self.obj(s.tgt(m)) {
                return Err(FunctorError::Endpoints(s.mor_name(m).into()));
            }
        }
        for o in s.object_ids() {
            if self.mor(s.id(o)) != t.id(self.obj(o)) {
                return Err(FunctorError::Identity(s.obj_name(o).into()));
            }
        }
        for g in s.morphism_ids() {
            for f in s.morphism_ids() {
                if let Some(gf) = s.compose(g, f) {
                    if t.compose(self.mor(g), self.mor(f)) != Some(self.mor(gf)) {
                        return Err(FunctorError::Composition {
                            g: s.mor_name(g).into(),
                            f: s.mor_name(f).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(c: &CatRef) -> Functor {
        Functor {
            source: c.clone(),
            target: c.clone(),
            obj_map: c.object_ids().collect(),
            mor_map: c.morphism_ids().collect(),
        }
    }

    /// Functor from index maps produced by a subcategory construction.
    pub fn from_sub(
        sub: CatRef,
        ambient: CatRef,
        objs: Vec<Obj>,
        mors: Vec<Mor>,
    ) -> Functor {
        Functor::new(sub, ambient, objs, mors).expect("subcategory inclusion")
    }

    /// Inclusion matching objects and morphisms by name.
    pub fn inclusion(sub: &CatRef, ambient: &CatRef) -> Result<Functor, FunctorError> {
        let objs = sub
            .object_names()
            .iter()
            .map(|n| ambient.find_object(n).ok_or(FunctorError::Missing(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mors = sub
            .morphism_ids()
            .map(|m| {
                let n = sub.mor_name(m);
                ambient.find_morphism(n).ok_or(FunctorError::Missing(n.into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Functor::new(sub.clone(), ambient.clone(), objs, mors)
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.obj_map[o.0]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.mor_map[m.0]
    }

    pub fn obj_map(&self) -> &[Obj] {
        &self.obj_map
    }

    pub fn mor_map(&self) -> &[Mor] {
        &self.mor_map
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Functor) -> Functor {
        assert!(
            Arc::ptr_eq(&inner.target, &self.source) || inner.target == self.source,
            "functor composition across different categories"
        );
        Functor {
            source: inner.source.clone(),
            target: self.target.clone(),
            obj_map: inner.obj_map.iter().map(|&o| self.obj(o)).collect(),
            mor_map: inner.mor_map.iter().map(|&m| self.mor(m)).collect(),
        }
    }

    pub fn is_injective_on_morphisms(&self) -> bool {
        let set: BTreeSet<Mor> = self.mor_map.iter().copied().collect();
        set.len() == self.mor_map.len()
    }

    /// Bijective on objects and morphisms.
    pub fn is_isomorphism(&self) -> bool {
        let objs: BTreeSet<Obj> = self.obj_map.iter().copied().collect();
        self.is_injective_on_morphisms()
            && objs.len() == self.obj_map.len()
            && self.obj_map.len() == self.target.num_objects()
            && self.mor_map.len() == self.target.num_morphisms()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn a2_spec() -> FinCatSpec {
        FinCatSpec {
            objects: vec!["0".into(), "1".into()],
            morphisms: vec![
                ("id0".into(), "0".into(), "0".into()),
                ("id1".into(), "1".into(), "1".into()),
                ("u".into(), "0".into(), "1".into()),
            ],
            identities: vec![("0".into(), "id0".into()), ("1".into(), "id1".into())],
            compositions: vec![],
        }
    }

    #[test]
    fn terminal_and_a2_validate() {
        let e = FinCat::terminal();
        assert_eq!((e.num_objects(), e.num_morphisms()), (1, 1));
        let mut spec = a2_spec();
        spec.fill_identity_composites();
        let a2 = FinCat::validate(&spec).unwrap();
        assert_eq!(a2.num_morphisms(), 3);
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut spec = a2_spec();
        spec.fill_identity_composites();
        spec.compositions.retain(|c| !(c.0 == "u" && c.1 == "id0"));
        let errs = FinCat::validate(&spec).unwrap_err();
        assert_eq!(
            errs,
            vec![FinCatError::MissingComposite {
                g: "u".into(),
                f: "id0".into()
            }]
        );
    }

    #[test]
    fn broken_unit_is_reported() {
        // Two endomorphisms on one object where the declared identity does not act as unit.
        let spec = FinCatSpec {
            objects: vec!["*".into()],
            morphisms: vec![
                ("i".into(), "*".into(), "*".into()),
                ("x".into(), "*".into(), "*".into()),
            ],
            identities: vec![("*".into(), "i".into())],
            compositions: vec![
                ("i".into(), "i".into(), "i".into()),
                ("i".into(), "x".into(), "i".into()),
                ("x".into(), "i".into(), "x".into()),
                ("x".into(), "x".into(), "x".into()),
            ],
        };
        let errs = FinCat::validate(&spec).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, FinCatError::BadIdentity { .. })));
    }

    #[test]
    fn non_associative_is_reported() {
        // Monoid table on {1, a, b} that is not associative.
        let objects = vec!["*".to_string()];
        let mors = vec![
            ("1".to_string(), 0, 0),
            ("a".to_string(), 0, 0),
            ("b".to_string(), 0, 0),
        ];
        // a*a = b, a*b = a, b*a = b, b*b = b: (a a) a = b a = b, a (a a) = a b = a
        let table = [[0, 1, 2], [1, 2, 1], [2, 2, 2]];
        let errs = FinCat::from_fn(objects, mors, vec![0], |g, f| table[g][f]).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, FinCatError::NonAssociative { .. })));
    }

    #[test]
    fn poset_builder_closes_transitively() {
        let p = FinCat::chain(2);
        assert_eq!(p.num_morphisms(), 6);
        assert!(p.is_poset() && p.is_delta());
        let cyc = FinCat::poset(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(cyc.is_err());
    }

    #[test]
    fn free_category_on_square_quiver() {
        let c = FinCat::free_on_dag(
            &["a", "b", "c", "d"],
            &[("f", "a", "b"), ("g", "b", "d"), ("h", "a", "c"), ("k", "c", "d")],
        )
        .unwrap();
        // 4 identities, 4 arrows, 2 length-two paths
        assert_eq!(c.num_morphisms(), 10);
        let a = c.find_object("a").unwrap();
        let d = c.find_object("d").unwrap();
        assert_eq!(c.hom(a, d).len(), 2);
        assert!(!c.is_poset() && c.is_delta());
    }

    #[test]
    fn functor_checks_composition() {
        let a2 = Arc::new(FinCat::chain(1));
        let e = Arc::new(FinCat::terminal());
        let collapse = Functor::new(a2.clone(), e.clone(), vec![Obj(0), Obj(0)], vec![Mor(0); 3]);
        assert!(collapse.is_ok());
        let bad = Functor::new(e.clone(), a2.clone(), vec![Obj(0)], vec![Mor(2)]);
        assert!(matches!(bad, Err(FunctorError::Endpoints(_))));
    }

    #[test]
    fn subcategories() {
        let c = FinCat::chain(2);
        let m01 = c.find_morphism("0<=1").unwrap();
        let m12 = c.find_morphism("1<=2").unwrap();
        assert!(c.subcategory(&[m01, m12]).is_err());
        let (g, _, _) = c.generated_subcategory(&[], &[m01, m12]);
        assert_eq!(g.num_morphisms(), 6);
        let (full, _, _) = c.full_subcategory(&[Obj(0), Obj(2)]);
        assert_eq!(full.num_morphisms(), 3);
    }
}
