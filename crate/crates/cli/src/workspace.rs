//! Loading and resolving named declarations.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use mapgraded::bimod::{arrow_category, tensor, Bimodule, BimodKey, RawBimodule};
use mapgraded::fincat::{chain_cover, CatRef, Elem, FinCat, FinCatSpec, Functor, Mor, Obj, SetBifunctor};
use mapgraded::groth::{grothendieck, FunctorialDiagram, PseudoFunctor};
use mapgraded::mapgraded::{restrict, GradedCat, GradedCatSpec, GradedFunctor, HomRef, HomSpec, ProductSpec};
use mapgraded::qlinalg::Matrix;
use mapgraded::random::{random_cover, rng};
use mapgraded::Q;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::format::*;

pub type G = GradedCat<Q>;
pub type GF = GradedFunctor<Q>;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("duplicate declaration {name} (in {first} and {second})")]
    DuplicateDeclaration { name: String, first: String, second: String },
    #[error("{file}: {decl} references undeclared {name}")]
    UnknownReference { file: String, decl: String, name: String },
    #[error("{file}: {decl} expects {name} to be a {expected}, but it is a {found}")]
    WrongKind {
        file: String,
        decl: String,
        name: String,
        expected: Kind,
        found: Kind,
    },
    #[error("{file}: declarations depend on each other in a cycle through {name}")]
    Cycle { file: String, name: String },
    #[error("{file}: {decl} is invalid: {msg}")]
    ValidationFailed { file: String, decl: String, msg: String },
    #[error("no {kind} named {name}")]
    NotFound { kind: Kind, name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Category,
    Functor,
    Bifunctor,
    Graded,
    GradedFunctor,
    Bimodule,
    Pseudofunctor,
    Diagram,
    Cover,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Category => "category",
            Kind::Functor => "functor",
            Kind::Bifunctor => "bifunctor",
            Kind::Graded => "graded category",
            Kind::GradedFunctor => "graded functor",
            Kind::Bimodule => "bimodule",
            Kind::Pseudofunctor => "pseudofunctor",
            Kind::Diagram => "diagram",
            Kind::Cover => "cover",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Decl {
    Category(CategoryDecl),
    Functor(FunctorDecl),
    Bifunctor(BifunctorDecl),
    Graded(GradedDecl),
    GradedFunctor(GradedFunctorDecl),
    Bimodule(BimoduleDecl),
    Pseudo(PseudoDecl),
    Diagram(DiagramDecl),
    Cover(CoverDecl),
}

impl Decl {
    pub fn kind(&self) -> Kind {
        match self {
            Decl::Category(_) => Kind::Category,
            Decl::Functor(_) => Kind::Functor,
            Decl::Bifunctor(_) => Kind::Bifunctor,
            Decl::Graded(_) => Kind::Graded,
            Decl::GradedFunctor(_) => Kind::GradedFunctor,
            Decl::Bimodule(_) => Kind::Bimodule,
            Decl::Pseudo(_) => Kind::Pseudofunctor,
            Decl::Diagram(_) => Kind::Diagram,
            Decl::Cover(_) => Kind::Cover,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Decl::Category(d) => d.name(),
            Decl::Functor(d) => d.name(),
            Decl::Bifunctor(d) => d.name(),
            Decl::Graded(d) => d.name(),
            Decl::GradedFunctor(d) => d.name(),
            Decl::Bimodule(d) => d.name(),
            Decl::Pseudo(d) => d.name(),
            Decl::Diagram(d) => &d.name,
            Decl::Cover(d) => d.name(),
        }
    }
}

/// Graded functors into a common target.
#[derive(Clone, Debug)]
pub struct Cover {
    pub target: Arc<G>,
    pub legs: Vec<GF>,
}

#[derive(Clone, Debug)]
pub enum Item {
    Category(CatRef),
    Functor(Arc<Functor>),
    Bifunctor(Arc<SetBifunctor>),
    Graded(Arc<G>),
    GradedFunctor(Arc<GF>),
    Bimodule(Arc<Bimodule<Q>>),
    Pseudofunctor(Arc<PseudoFunctor<Q>>),
    Diagram(Arc<FunctorialDiagram<Q>>),
    Cover(Arc<Cover>),
}

#[derive(Clone, Debug)]
struct Entry {
    decl: Decl,
    file: String,
}

/// Validated declarations, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    order: Vec<String>,
    entries: HashMap<String, Entry>,
    items: HashMap<String, Item>,
}

/// Where an error is reported from.
#[derive(Clone, Copy)]
struct Ctx<'a> {
    file: &'a str,
    decl: &'a str,
}

impl Ctx<'_> {
    fn invalid(&self, msg: impl fmt::Display) -> LoadError {
        LoadError::ValidationFailed {
            file: self.file.to_string(),
            decl: self.decl.to_string(),
            msg: msg.to_string(),
        }
    }
}

fn join_errors<E: fmt::Display>(errs: Vec<E>) -> String {
    errs.iter().map(E::to_string).collect::<Vec<_>>().join("; ")
}

impl Workspace {
    /// Reads each file into a `(path, text)` pair for [`Workspace::from_sources`].
    pub fn read_sources(paths: &[impl AsRef<Path>]) -> Result<Vec<(String, String)>, LoadError> {
        let mut sources = Vec::new();
        for p in paths {
            let path = p.as_ref().display().to_string();
            let text = std::fs::read_to_string(p).map_err(|e| LoadError::Io {
                path: path.clone(),
                msg: e.to_string(),
            })?;
            sources.push((path, text));
        }
        Ok(sources)
    }

    /// `(label, JSON text)` pairs, read as one workspace.
    pub fn from_sources(sources: &[(String, String)]) -> Result<Workspace, LoadError> {
        let mut ws = Workspace::default();
        for (path, text) in sources {
            let file: WorkspaceFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
                path: path.clone(),
                line: e.line(),
                column: e.column(),
                msg: {
                    let m = e.to_string();
                    m.rsplit_once(" at line ").map_or(m.clone(), |(head, _)| head.to_string())
                },
            })?;
            let decls = file
                .categories
                .into_iter()
                .map(Decl::Category)
                .chain(file.functors.into_iter().map(Decl::Functor))
                .chain(file.bifunctors.into_iter().map(Decl::Bifunctor))
                .chain(file.graded.into_iter().map(Decl::Graded))
                .chain(file.graded_functors.into_iter().map(Decl::GradedFunctor))
                .chain(file.bimodules.into_iter().map(Decl::Bimodule))
                .chain(file.pseudofunctors.into_iter().map(Decl::Pseudo))
                .chain(file.diagrams.into_iter().map(Decl::Diagram))
                .chain(file.covers.into_iter().map(Decl::Cover));
            for decl in decls {
                let name = decl.name().to_string();
                if let Some(old) = ws.entries.get(&name) {
                    return Err(LoadError::DuplicateDeclaration {
                        name,
                        first: old.file.clone(),
                        second: path.clone(),
                    });
                }
                ws.order.push(name.clone());
                ws.entries.insert(
                    name,
                    Entry {
                        decl,
                        file: path.clone(),
                    },
                );
            }
        }
        for name in ws.order.clone() {
            ws.resolve(&name, &mut Vec::new())?;
        }
        Ok(ws)
    }

    /// Declaration names in order, with their kinds.
    pub fn declarations(&self) -> impl Iterator<Item = (&str, &Decl)> {
        self.order.iter().map(|n| (n.as_str(), &self.entries[n].decl))
    }

    pub fn item(&self, name: &str) -> Option<&Item> {
        self.items.get(name)
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.entries.get(name).map(|e| &e.decl)
    }

    fn resolve(&mut self, name: &str, stack: &mut Vec<String>) -> Result<Item, LoadError> {
        if let Some(it) = self.items.get(name) {
            return Ok(it.clone());
        }
        let entry = self.entries.get(name).cloned().ok_or_else(|| LoadError::NotFound {
            kind: Kind::Category,
            name: name.to_string(),
        })?;
        if stack.iter().any(|s| s == name) {
            return Err(LoadError::Cycle {
                file: entry.file.clone(),
                name: name.to_string(),
            });
        }
        stack.push(name.to_string());
        let ctx = Ctx {
            file: &entry.file,
            decl: name,
        };
        let item = match &entry.decl {
            Decl::Category(d) => Item::Category(Arc::new(self.build_category(ctx, d, stack)?)),
            Decl::Functor(d) => Item::Functor(Arc::new(self.build_functor(ctx, d, stack)?)),
            Decl::Bifunctor(d) => Item::Bifunctor(Arc::new(self.build_bifunctor(ctx, d, stack)?)),
            Decl::Graded(d) => Item::Graded(self.graded_decl(ctx, d, stack)?),
            Decl::GradedFunctor(d) => Item::GradedFunctor(Arc::new(self.build_graded_functor(ctx, d, stack)?)),
            Decl::Bimodule(d) => Item::Bimodule(Arc::new(self.build_bimodule(ctx, d, stack)?)),
            Decl::Pseudo(d) => Item::Pseudofunctor(Arc::new(self.build_pseudo(ctx, d, stack)?)),
            Decl::Diagram(d) => Item::Diagram(Arc::new(self.build_diagram(ctx, d, stack)?)),
            Decl::Cover(d) => Item::Cover(Arc::new(self.build_cover(ctx, d, stack)?)),
        };
        stack.pop();
        self.items.insert(name.to_string(), item.clone());
        Ok(item)
    }

    fn lookup(&mut self, ctx: Ctx, name: &str, expected: Kind, stack: &mut Vec<String>) -> Result<Item, LoadError> {
        let found = match self.entries.get(name) {
            Some(e) => e.decl.kind(),
            None => {
                return Err(LoadError::UnknownReference {
                    file: ctx.file.to_string(),
                    decl: ctx.decl.to_string(),
                    name: name.to_string(),
                })
            }
        };
        if found != expected {
            return Err(LoadError::WrongKind {
                file: ctx.file.to_string(),
                decl: ctx.decl.to_string(),
                name: name.to_string(),
                expected,
                found,
            });
        }
        self.resolve(name, stack)
    }
}

macro_rules! getters {
    ($($res:ident / $get:ident: $variant:ident => $t:ty),*) => {
        // Not every kind is referenced by another kind or by a command.
        #[allow(dead_code)]
        impl Workspace {
            $(
                fn $res(&mut self, ctx: Ctx, name: &str, stack: &mut Vec<String>) -> Result<$t, LoadError> {
                    match self.lookup(ctx, name, Kind::$variant, stack)? {
                        Item::$variant(x) => Ok(x),
                        _ => unreachable!("kind checked by lookup"),
                    }
                }

                pub fn $get(&self, name: &str) -> Result<$t, LoadError> {
                    match self.items.get(name) {
                        Some(Item::$variant(x)) => Ok(x.clone()),
                        _ => Err(LoadError::NotFound { kind: Kind::$variant, name: name.to_string() }),
                    }
                }
            )*
        }
    };
}

getters! {
    res_cat / category: Category => CatRef,
    res_functor / functor: Functor => Arc<Functor>,
    res_bifunctor / bifunctor: Bifunctor => Arc<SetBifunctor>,
    res_graded / graded: Graded => Arc<G>,
    res_gfunctor / graded_functor: GradedFunctor => Arc<GF>,
    res_bimodule / bimodule: Bimodule => Arc<Bimodule<Q>>,
    res_pseudo / pseudofunctor: Pseudofunctor => Arc<PseudoFunctor<Q>>,
    res_diagram / diagram: Diagram => Arc<FunctorialDiagram<Q>>,
    res_cover / cover: Cover => Arc<Cover>
}

fn find_obj(ctx: Ctx, c: &FinCat, name: &str) -> Result<Obj, LoadError> {
    c.find_object(name).ok_or_else(|| ctx.invalid(format!("no object {name}")))
}

fn find_mor(ctx: Ctx, c: &FinCat, name: &str) -> Result<Mor, LoadError> {
    c.find_morphism(name).ok_or_else(|| ctx.invalid(format!("no morphism {name}")))
}

fn find_gobj(ctx: Ctx, a: &G, name: &str) -> Result<usize, LoadError> {
    a.find_object(name).ok_or_else(|| ctx.invalid(format!("no object {name}")))
}

/// Sharp morphism and basis index of an element reference.
fn find_elem(ctx: Ctx, a: &G, r: &ElemRef) -> Result<(Mor, usize), LoadError> {
    let s = find_hom(ctx, a, &r.mor, &r.src, &r.tgt)?;
    let i = a
        .basis(s)
        .iter()
        .position(|e| *e == r.elem)
        .ok_or_else(|| ctx.invalid(format!("no basis element {} in {}", r.elem, a.hom_name(s))))?;
    Ok((s, i))
}

fn find_hom(ctx: Ctx, a: &G, mor: &str, src: &str, tgt: &str) -> Result<Mor, LoadError> {
    let u = find_mor(ctx, &a.base, mor)?;
    let (x, y) = (find_gobj(ctx, a, src)?, find_gobj(ctx, a, tgt)?);
    a.sharp_mor(u, x, y)
        .ok_or_else(|| ctx.invalid(format!("{src} -> {tgt} does not lie over {mor}")))
}

fn coefs(ctx: Ctx, v: &[Coef]) -> Result<Vec<(String, Q)>, LoadError> {
    v.iter()
        .map(|c| Ok((c.0.clone(), coef_value(c).map_err(|e| ctx.invalid(e))?)))
        .collect()
}

/// Sparse vector in a named basis.
fn sparse_in(ctx: Ctx, basis: &[String], v: &[Coef], what: &str) -> Result<Vec<(usize, Q)>, LoadError> {
    let mut out: Vec<(usize, Q)> = Vec::new();
    for (name, q) in coefs(ctx, v)? {
        let i = basis
            .iter()
            .position(|b| *b == name)
            .ok_or_else(|| ctx.invalid(format!("no basis element {name} in {what}")))?;
        if !q.is_zero() {
            out.push((i, q));
        }
    }
    out.sort_by_key(|x| x.0);
    Ok(out)
}

/// The identity of `a` when it is a single basis element with coefficient 1.
fn unit_index(a: &G, x: usize) -> Option<usize> {
    match a.identity_sparse(x) {
        [(i, q)] if q.is_one() => Some(*i),
        _ => None,
    }
}

impl Workspace {
    fn build_category(&mut self, ctx: Ctx, d: &CategoryDecl, stack: &mut Vec<String>) -> Result<FinCat, LoadError> {
        fn refs(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        match d {
            CategoryDecl::Table {
                objects,
                morphisms,
                identities,
                compositions,
                ..
            } => {
                let mut spec = FinCatSpec {
                    objects: objects.clone(),
                    morphisms: morphisms.clone(),
                    identities: identities.clone(),
                    compositions: compositions.clone(),
                };
                spec.fill_identity_composites();
                FinCat::validate(&spec).map_err(|e| ctx.invalid(join_errors(e)))
            }
            CategoryDecl::Poset { elements, relations, .. } => {
                let rel: Vec<(&str, &str)> = relations.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                FinCat::poset(&refs(elements), &rel).map_err(|e| ctx.invalid(e))
            }
            CategoryDecl::Chain { length, .. } => Ok(FinCat::chain(*length)),
            CategoryDecl::Terminal { .. } => Ok(FinCat::terminal()),
            CategoryDecl::Free { objects, arrows, .. } => {
                let arr: Vec<(&str, &str, &str)> =
                    arrows.iter().map(|(n, s, t)| (n.as_str(), s.as_str(), t.as_str())).collect();
                FinCat::free_on_dag(&refs(objects), &arr).map_err(|e| ctx.invalid(e))
            }
            CategoryDecl::Full { category, objects, .. } => {
                let c = self.res_cat(ctx, category, stack)?;
                let objs = objects.iter().map(|o| find_obj(ctx, &c, o)).collect::<Result<Vec<_>, _>>()?;
                Ok(c.full_subcategory(&objs).0)
            }
        }
    }

    fn build_functor(&mut self, ctx: Ctx, d: &FunctorDecl, stack: &mut Vec<String>) -> Result<Functor, LoadError> {
        match d {
            FunctorDecl::Table {
                source,
                target,
                objects,
                morphisms,
                ..
            } => {
                let (s, t) = (self.res_cat(ctx, source, stack)?, self.res_cat(ctx, target, stack)?);
                let mut obj_map = vec![None; s.num_objects()];
                for (a, b) in objects {
                    obj_map[find_obj(ctx, &s, a)?.0] = Some(find_obj(ctx, &t, b)?);
                }
                let obj_map = obj_map
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| o.ok_or_else(|| ctx.invalid(format!("object {} has no image", s.obj_name(Obj(i))))))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut mor_map = vec![None; s.num_morphisms()];
                for (f, g) in morphisms {
                    mor_map[find_mor(ctx, &s, f)?.0] = Some(find_mor(ctx, &t, g)?);
                }
                let mor_map = s
                    .morphism_ids()
                    .map(|m| match mor_map[m.0] {
                        Some(g) => Ok(g),
                        None => match t.hom(obj_map[s.src(m).0], obj_map[s.tgt(m).0]) {
                            [g] => Ok(*g),
                            _ => Err(ctx.invalid(format!("morphism {} needs an explicit image", s.mor_name(m)))),
                        },
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Functor::new(s, t, obj_map, mor_map).map_err(|e| ctx.invalid(e))
            }
            FunctorDecl::Identity { category, .. } => Ok(Functor::identity(&self.res_cat(ctx, category, stack)?)),
            FunctorDecl::Inclusion { source, target, .. } => {
                let (s, t) = (self.res_cat(ctx, source, stack)?, self.res_cat(ctx, target, stack)?);
                Functor::inclusion(&s, &t).map_err(|e| ctx.invalid(e))
            }
        }
    }

    fn build_bifunctor(&mut self, ctx: Ctx, d: &BifunctorDecl, stack: &mut Vec<String>) -> Result<SetBifunctor, LoadError> {
        match d {
            BifunctorDecl::Table {
                left,
                right,
                elems,
                left_action,
                right_action,
                ..
            } => {
                let (l, r) = (self.res_cat(ctx, left, stack)?, self.res_cat(ctx, right, stack)?);
                let els = elems
                    .iter()
                    .map(|(n, s, t)| {
                        Ok(Elem {
                            name: n.clone(),
                            src: find_obj(ctx, &r, s)?,
                            tgt: find_obj(ctx, &l, t)?,
                        })
                    })
                    .collect::<Result<Vec<_>, LoadError>>()?;
                let elem = |n: &str| {
                    els.iter()
                        .position(|e| e.name == n)
                        .ok_or_else(|| ctx.invalid(format!("no element {n}")))
                };
                let mut la = HashMap::new();
                for (u, s, res) in left_action {
                    la.insert((find_mor(ctx, &l, u)?, elem(s)?), elem(res)?);
                }
                let mut ra = HashMap::new();
                for (s, v, res) in right_action {
                    ra.insert((elem(s)?, find_mor(ctx, &r, v)?), elem(res)?);
                }
                let unique = |src: Obj, tgt: Obj| {
                    let c: Vec<usize> = (0..els.len()).filter(|&i| els[i].src == src && els[i].tgt == tgt).collect();
                    if c.len() == 1 {
                        c[0]
                    } else {
                        usize::MAX
                    }
                };
                SetBifunctor::new(
                    l.clone(),
                    r.clone(),
                    els.clone(),
                    |u, s| match la.get(&(u, s)) {
                        Some(&x) => x,
                        None if l.is_identity(u) => s,
                        None => unique(els[s].src, l.tgt(u)),
                    },
                    |s, v| match ra.get(&(s, v)) {
                        Some(&x) => x,
                        None if r.is_identity(v) => s,
                        None => unique(r.src(v), els[s].tgt),
                    },
                )
                .map_err(|e| ctx.invalid(e))
            }
            BifunctorDecl::Identity { category, .. } => Ok(SetBifunctor::identity(&self.res_cat(ctx, category, stack)?)),
            BifunctorDecl::Lower { functor, .. } => Ok(SetBifunctor::lower(&*self.res_functor(ctx, functor, stack)?)),
            BifunctorDecl::Upper { functor, .. } => Ok(SetBifunctor::upper(&*self.res_functor(ctx, functor, stack)?)),
        }
    }

    fn graded_decl(&mut self, ctx: Ctx, d: &GradedDecl, stack: &mut Vec<String>) -> Result<Arc<G>, LoadError> {
        let g = match d {
            GradedDecl::Table {
                base,
                objects,
                homs,
                products,
                identities,
                ..
            } => {
                let base = self.res_cat(ctx, base, stack)?;
                graded_table(ctx, &base, objects, homs, products, identities)?
            }
            GradedDecl::Ground { .. } => G::ground(),
            GradedDecl::TruncatedPolynomial { n, .. } => {
                if *n == 0 {
                    return Err(ctx.invalid("n must be at least 1"));
                }
                G::truncated_polynomial(*n)
            }
            GradedDecl::Free { base, .. } => G::free(&self.res_cat(ctx, base, stack)?),
            GradedDecl::Linearize { functor, .. } => G::linearize(&*self.res_functor(ctx, functor, stack)?),
            GradedDecl::Restriction { graded, along, .. } => {
                let (a, phi) = (self.res_graded(ctx, graded, stack)?, self.res_functor(ctx, along, stack)?);
                if *phi.target != *a.base {
                    return Err(ctx.invalid(format!("{along} does not land in the base of {graded}")));
                }
                return Ok(restrict(&a, &phi).0);
            }
            GradedDecl::Arrow { bimodule, .. } => return Ok(arrow_category(&*self.res_bimodule(ctx, bimodule, stack)?).cat),
            GradedDecl::Grothendieck { pseudofunctor, .. } => {
                let p = self.res_pseudo(ctx, pseudofunctor, stack)?;
                return Ok(grothendieck(&p).map_err(|e| ctx.invalid(e))?.cat);
            }
        };
        Ok(Arc::new(g))
    }

    fn build_graded_functor(&mut self, ctx: Ctx, d: &GradedFunctorDecl, stack: &mut Vec<String>) -> Result<GF, LoadError> {
        match d {
            GradedFunctorDecl::Table {
                source,
                target,
                base,
                objects,
                homs,
                ..
            } => {
                let (s, t) = (self.res_graded(ctx, source, stack)?, self.res_graded(ctx, target, stack)?);
                let phi = self.res_functor(ctx, base, stack)?;
                if *phi.source != *s.base || *phi.target != *t.base {
                    return Err(ctx.invalid(format!("{base} does not go between the bases")));
                }
                let mut obj_map = vec![None; s.num_objects()];
                for (a, b) in objects {
                    obj_map[find_gobj(ctx, &s, a)?] = Some(find_gobj(ctx, &t, b)?);
                }
                let obj_map = obj_map
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| o.ok_or_else(|| ctx.invalid(format!("object {} has no image", s.obj_name(i)))))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut given = HashMap::new();
                for h in homs {
                    let m = find_hom(ctx, &s, &h.mor, &h.src, &h.tgt)?;
                    let rows = h
                        .matrix
                        .iter()
                        .map(|r| r.iter().map(|x| parse_rational(x).map_err(|e| ctx.invalid(e))).collect())
                        .collect::<Result<Vec<Vec<Q>>, _>>()?;
                    given.insert(m, rows);
                }
                let mut mats = Vec::new();
                for m in s.sharp_cat().morphism_ids() {
                    let (u, x, y) = s.key(m);
                    let image = t
                        .sharp_mor(phi.mor(u), obj_map[x], obj_map[y])
                        .ok_or_else(|| ctx.invalid(format!("{} has no image hom", s.hom_name(m))))?;
                    let (rows, cols) = (t.dim(image), s.dim(m));
                    let mat = match given.remove(&m) {
                        Some(data) => {
                            if data.len() != rows || data.iter().any(|r| r.len() != cols) {
                                return Err(ctx.invalid(format!("matrix of {} must be {rows} x {cols}", s.hom_name(m))));
                            }
                            Matrix::from_dense(rows, cols, &data)
                        }
                        None if cols == 0 => Matrix::zeros(rows, 0),
                        None => return Err(ctx.invalid(format!("no matrix for {}", s.hom_name(m)))),
                    };
                    mats.push(mat);
                }
                GradedFunctor::new(s, t, (*phi).clone(), obj_map, mats).map_err(|e| ctx.invalid(e))
            }
            GradedFunctorDecl::Identity { graded, .. } => Ok(GradedFunctor::identity(&self.res_graded(ctx, graded, stack)?)),
            GradedFunctorDecl::Restriction { graded, along, .. } => {
                let (a, phi) = (self.res_graded(ctx, graded, stack)?, self.res_functor(ctx, along, stack)?);
                if *phi.target != *a.base {
                    return Err(ctx.invalid(format!("{along} does not land in the base of {graded}")));
                }
                Ok(restrict(&a, &phi).1)
            }
        }
    }

    fn build_bimodule(&mut self, ctx: Ctx, d: &BimoduleDecl, stack: &mut Vec<String>) -> Result<Bimodule<Q>, LoadError> {
        match d {
            BimoduleDecl::Table {
                left,
                right,
                carrier,
                spaces,
                left_action,
                right_action,
                ..
            } => {
                let (a, b) = (self.res_graded(ctx, left, stack)?, self.res_graded(ctx, right, stack)?);
                let s = self.res_bifunctor(ctx, carrier, stack)?;
                if *s.left != *a.base || *s.right != *b.base {
                    return Err(ctx.invalid(format!("{carrier} is not a bifunctor between the bases")));
                }
                bimodule_table(ctx, a, b, s, spaces, left_action, right_action)
            }
            BimoduleDecl::Identity { graded, .. } => Ok(Bimodule::identity(&self.res_graded(ctx, graded, stack)?)),
            BimoduleDecl::Lower { functor, .. } => Ok(Bimodule::lower(&*self.res_gfunctor(ctx, functor, stack)?)),
            BimoduleDecl::Upper { functor, .. } => Ok(Bimodule::upper(&*self.res_gfunctor(ctx, functor, stack)?)),
            BimoduleDecl::Tensor { left, right, .. } => {
                let (m, n) = (self.res_bimodule(ctx, left, stack)?, self.res_bimodule(ctx, right, stack)?);
                Ok(tensor(&m, &n).map_err(|e| ctx.invalid(e))?.bimodule)
            }
        }
    }

    fn build_pseudo(&mut self, ctx: Ctx, d: &PseudoDecl, stack: &mut Vec<String>) -> Result<PseudoFunctor<Q>, LoadError> {
        match d {
            PseudoDecl::Constant { base, graded, .. } => {
                let (c, a) = (self.res_cat(ctx, base, stack)?, self.res_graded(ctx, graded, stack)?);
                if c.num_objects() == 0 {
                    return Err(ctx.invalid("empty base"));
                }
                Ok(PseudoFunctor::constant(&c, &a))
            }
            PseudoDecl::Arrow { bimodule, .. } => Ok(PseudoFunctor::arrow(&*self.res_bimodule(ctx, bimodule, stack)?)),
            PseudoDecl::Chain { pieces, steps, .. } => {
                let ps = pieces
                    .iter()
                    .map(|p| self.res_graded(ctx, p, stack))
                    .collect::<Result<Vec<_>, _>>()?;
                let ss = steps
                    .iter()
                    .map(|s| self.res_bimodule(ctx, s, stack).map(|m| (*m).clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                if ps.is_empty() || ss.len() + 1 != ps.len() {
                    return Err(ctx.invalid("a chain needs one step between consecutive pieces"));
                }
                PseudoFunctor::chain(ps, ss).map_err(|e| ctx.invalid(e))
            }
            PseudoDecl::Diagram { diagram, .. } => {
                let d = self.res_diagram(ctx, diagram, stack)?;
                d.pseudofunctor().map_err(|e| ctx.invalid(e))
            }
        }
    }

    fn build_diagram(&mut self, ctx: Ctx, d: &DiagramDecl, stack: &mut Vec<String>) -> Result<FunctorialDiagram<Q>, LoadError> {
        let c = self.res_cat(ctx, &d.base, stack)?;
        let mut pieces = vec![None; c.num_objects()];
        for (o, g) in &d.pieces {
            let slot = &mut pieces[find_obj(ctx, &c, o)?.0];
            if slot.is_some() {
                return Err(ctx.invalid(format!("two pieces over {o}")));
            }
            *slot = Some(self.res_graded(ctx, g, stack)?);
        }
        let pieces = pieces
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| ctx.invalid(format!("no piece over {}", c.obj_name(Obj(i))))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut functors = HashMap::new();
        for (m, f) in &d.functors {
            functors.insert(find_mor(ctx, &c, m)?, (*self.res_gfunctor(ctx, f, stack)?).clone());
        }
        FunctorialDiagram::new(c, pieces, functors).map_err(|e| ctx.invalid(e))
    }

    fn build_cover(&mut self, ctx: Ctx, d: &CoverDecl, stack: &mut Vec<String>) -> Result<Cover, LoadError> {
        match d {
            CoverDecl::Table { target, legs, .. } => {
                let t = self.res_graded(ctx, target, stack)?;
                let mut out = Vec::new();
                for l in legs {
                    let f = self.res_gfunctor(ctx, l, stack)?;
                    if !Arc::ptr_eq(&f.target, &t) && !f.target.structurally_equal(&t) {
                        return Err(ctx.invalid(format!("{l} does not land in {target}")));
                    }
                    out.push((*f).clone());
                }
                if out.is_empty() {
                    return Err(ctx.invalid("a cover needs at least one leg"));
                }
                Ok(Cover { target: t, legs: out })
            }
            CoverDecl::Chains { graded, .. } => {
                let a = self.res_graded(ctx, graded, stack)?;
                let cc = chain_cover(&a.base).map_err(|e| ctx.invalid(e))?;
                let legs = cc.chains.iter().map(|f| restrict(&a, f).1).collect();
                Ok(Cover { target: a, legs })
            }
            CoverDecl::Random { graded, extra, seed, .. } => {
                let a = self.res_graded(ctx, graded, stack)?;
                if !a.base.is_poset() {
                    return Err(ctx.invalid("random covers need a poset base"));
                }
                let legs = random_cover(&mut rng(*seed), &a, *extra);
                Ok(Cover { target: a, legs })
            }
        }
    }
}

fn graded_table(
    ctx: Ctx,
    base: &CatRef,
    objects: &[(String, String)],
    homs: &[HomDecl],
    products: &[ProductDecl],
    identities: &[IdentityDecl],
) -> Result<G, LoadError> {
    let href = |mor: &str, src: &str, tgt: &str| HomRef {
        mor: mor.to_string(),
        src: src.to_string(),
        tgt: tgt.to_string(),
    };
    let mut spec: GradedCatSpec<Q> = GradedCatSpec {
        objects: objects.to_vec(),
        homs: homs
            .iter()
            .map(|h| HomSpec {
                hom: href(&h.mor, &h.src, &h.tgt),
                basis: h.basis.clone(),
            })
            .collect(),
        ..Default::default()
    };
    for p in products {
        spec.products.push(ProductSpec {
            left: (href(&p.left.mor, &p.left.src, &p.left.tgt), p.left.elem.clone()),
            right: (href(&p.right.mor, &p.right.src, &p.right.tgt), p.right.elem.clone()),
            result: coefs(ctx, &p.result)?,
        });
    }
    for i in identities {
        spec.identities.push((i.object.clone(), coefs(ctx, &i.value)?));
    }
    // Single-element identities and their products, where left out.
    let over: HashMap<&str, &str> = objects.iter().map(|(o, u)| (o.as_str(), u.as_str())).collect();
    let id_mor = |o: &str| -> Option<String> {
        let u = base.find_object(over.get(o)?)?;
        Some(base.mor_name(base.id(u)).to_string())
    };
    let mut units: HashMap<String, (HomRef, String)> = HashMap::new();
    for (o, _) in objects {
        let Some(idm) = id_mor(o) else { continue };
        let declared = spec.identities.iter().find(|(x, _)| x == o).map(|(_, v)| v.clone());
        let hom = homs.iter().find(|h| h.mor == idm && h.src == *o && h.tgt == *o);
        let unit = match (declared, hom) {
            (Some(v), _) => match v.as_slice() {
                [(e, q)] if q.is_one() => Some(e.clone()),
                _ => None,
            },
            (None, Some(h)) if h.basis.len() == 1 => {
                spec.identities.push((o.clone(), vec![(h.basis[0].clone(), Q::one())]));
                Some(h.basis[0].clone())
            }
            _ => None,
        };
        if let Some(e) = unit {
            units.insert(o.clone(), (href(&idm, o, o), e));
        }
    }
    let listed: HashSet<(HomRef, String, HomRef, String)> = spec
        .products
        .iter()
        .map(|p| (p.left.0.clone(), p.left.1.clone(), p.right.0.clone(), p.right.1.clone()))
        .collect();
    let mut extra = Vec::new();
    for h in homs {
        let r = href(&h.mor, &h.src, &h.tgt);
        for x in &h.basis {
            let mut push = |left: (HomRef, String), right: (HomRef, String)| {
                if !listed.contains(&(left.0.clone(), left.1.clone(), right.0.clone(), right.1.clone())) {
                    extra.push(ProductSpec {
                        left,
                        right,
                        result: vec![(x.clone(), Q::one())],
                    });
                }
            };
            if let Some(u) = units.get(&h.tgt) {
                push(u.clone(), (r.clone(), x.clone()));
            }
            if let Some(u) = units.get(&h.src) {
                if !(units.get(&h.tgt).is_some_and(|t| t.0 == r && t.1 == *x)) {
                    push((r.clone(), x.clone()), u.clone());
                }
            }
        }
    }
    spec.products.extend(extra);
    G::from_spec(base, &spec).map_err(|e| ctx.invalid(join_errors(e)))
}

fn bimodule_table(
    ctx: Ctx,
    a: Arc<G>,
    b: Arc<G>,
    s: Arc<SetBifunctor>,
    spaces: &[SpaceDecl],
    left_action: &[ActionDecl],
    right_action: &[ActionDecl],
) -> Result<Bimodule<Q>, LoadError> {
    let elem = |n: &str| s.find_elem(n).ok_or_else(|| ctx.invalid(format!("no carrier element {n}")));
    let key = |r: &SpaceRef| -> Result<BimodKey, LoadError> {
        Ok((elem(&r.elem)?, find_gobj(ctx, &b, &r.from)?, find_gobj(ctx, &a, &r.to)?))
    };
    let mut bases: HashMap<BimodKey, Vec<String>> = HashMap::new();
    for sp in spaces {
        let k = key(&SpaceRef {
            elem: sp.elem.clone(),
            from: sp.from.clone(),
            to: sp.to.clone(),
        })?;
        if bases.insert(k, sp.basis.clone()).is_some() {
            return Err(ctx.invalid(format!("space {}({}, {}) declared twice", sp.elem, sp.from, sp.to)));
        }
    }
    let empty = Vec::new();
    let basis_of = |k: &BimodKey| bases.get(k).unwrap_or(&empty);
    let position = |k: &BimodKey, n: &str| {
        basis_of(k)
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| ctx.invalid(format!("no element {n} in space {}", s.elem(k.0).name)))
    };
    let mut raw = RawBimodule {
        left: a.clone(),
        right: b.clone(),
        carrier: s.clone(),
        bases: bases.clone(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    for act in left_action {
        let (g, i) = find_elem(ctx, &a, &act.hom)?;
        let k = key(&act.space)?;
        let j = position(&k, &act.vec)?;
        let (u, x, y) = a.key(g);
        if x != k.2 {
            return Err(ctx.invalid(format!("{} does not act on {}", a.hom_name(g), act.vec)));
        }
        let t = (s.act_left(u, k.0), k.1, y);
        raw.left_act.insert((g, i, k, j), sparse_in(ctx, basis_of(&t), &act.result, "the target space")?);
    }
    for act in right_action {
        let (h, i) = find_elem(ctx, &b, &act.hom)?;
        let k = key(&act.space)?;
        let j = position(&k, &act.vec)?;
        let (v, x, y) = b.key(h);
        if y != k.1 {
            return Err(ctx.invalid(format!("{} does not act on {}", b.hom_name(h), act.vec)));
        }
        let t = (s.act_right(k.0, v), x, k.2);
        raw.right_act.insert((k, j, h, i), sparse_in(ctx, basis_of(&t), &act.result, "the target space")?);
    }
    for (k, basis) in &bases {
        if let Some(e) = unit_index(&a, k.2) {
            let g = a.identity_mor(k.2);
            for j in 0..basis.len() {
                raw.left_act.entry((g, e, *k, j)).or_insert_with(|| vec![(j, Q::one())]);
            }
        }
        if let Some(e) = unit_index(&b, k.1) {
            let h = b.identity_mor(k.1);
            for j in 0..basis.len() {
                raw.right_act.entry((*k, j, h, e)).or_insert_with(|| vec![(j, Q::one())]);
            }
        }
    }
    Bimodule::new(raw).map_err(|e| ctx.invalid(join_errors(e)))
}
