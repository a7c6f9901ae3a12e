//! Map-graded sets and linear categories, graded functors, restrictions,
//! pullbacks and descent glueing.

mod descent;
mod functor;
mod pullback;

pub use descent::{glue_descent, DescentDatum, DescentError, GlueOptions, Glued, Overlap, Transition};
pub use functor::{change_basis, restrict, sharp, GradedFunctor, GradedFunctorError};
pub use pullback::{pullback_graded, GradedPullback};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{CatRef, FinCat, Functor, Mor, MorData, Obj};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

/// A morphism of `U^♯`: base morphism, source object, target object.
pub type SharpKey = (Mor, usize, usize);

/// Sparse vector: sorted `(index, value)` pairs without zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberObj {
    pub name: String,
    pub over: Obj,
}

/// Finite sets of labelled objects over the objects of a base category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSet {
    pub base: CatRef,
    pub objects: Vec<FiberObj>,
}

impl GradedSet {
    pub fn fiber(&self, u: Obj) -> Vec<usize> {
        (0..self.objects.len())
            .filter(|&i| self.objects[i].over == u)
            .collect()
    }

    /// `U^♯`, the singleton graded set over it and the forgetful functor.
    pub fn sharp(&self) -> (CatRef, GradedSet, Functor) {
        let (cat, keys, _) = sharp_category(&self.base, &self.objects);
        let cat = Arc::new(cat);
        let set = GradedSet {
            base: cat.clone(),
            objects: self
                .objects
                .iter()
                .enumerate()
                .map(|(i, o)| FiberObj {
                    name: o.name.clone(),
                    over: Obj(i),
                })
                .collect(),
        };
        let forget = Functor::new(
            cat.clone(),
            self.base.clone(),
            self.objects.iter().map(|o| o.over).collect(),
            keys.iter().map(|k| k.0).collect(),
        )
        .expect("forgetful functor");
        (cat, set, forget)
    }
}

/// `U^♯` with morphisms ordered by base morphism, then source object, then
/// target object (both in declaration order).
fn sharp_category(
    base: &FinCat,
    objects: &[FiberObj],
) -> (FinCat, Vec<SharpKey>, HashMap<SharpKey, Mor>) {
    let mut fibers = vec![Vec::new(); base.num_objects()];
    for (i, o) in objects.iter().enumerate() {
        fibers[o.over.0].push(i);
    }
    let mut keys = Vec::new();
    for u in base.morphism_ids() {
        for &a in &fibers[base.src(u).0] {
            for &b in &fibers[base.tgt(u).0] {
                keys.push((u, a, b));
            }
        }
    }
    let index: HashMap<SharpKey, Mor> = keys.iter().enumerate().map(|(i, &k)| (k, Mor(i))).collect();
    let singleton = fibers.iter().all(|f| f.len() <= 1);
    let morphisms: Vec<MorData> = keys
        .iter()
        .map(|&(u, a, b)| MorData {
            name: if singleton {
                base.mor_name(u).to_string()
            } else {
                format!("{}:{}->{}", base.mor_name(u), objects[a].name, objects[b].name)
            },
            src: Obj(a),
            tgt: Obj(b),
        })
        .collect();
    let identity: Vec<Mor> = objects
        .iter()
        .enumerate()
        .map(|(i, o)| index[&(base.id(o.over), i, i)])
        .collect();
    let n = keys.len();
    let mut comp = vec![None; n * n];
    for (gi, &(g, b, c)) in keys.iter().enumerate() {
        for (fi, &(f, a, b2)) in keys.iter().enumerate() {
            if b == b2 {
                comp[gi * n + fi] = Some(index[&(base.compose(g, f).unwrap(), a, c)]);
            }
        }
    }
    let cat = FinCat::assemble(
        objects.iter().map(|o| o.name.clone()).collect(),
        morphisms,
        identity,
        comp,
    );
    (cat, keys, index)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("unknown base object {0}")]
    UnknownBaseObject(String),
    #[error("unknown base morphism {0}")]
    UnknownBaseMorphism(String),
    #[error("duplicate object {0}")]
    DuplicateObject(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("hom {hom}: {reason}")]
    BadHom { hom: String, reason: String },
    #[error("unknown basis element {elt} of {hom}")]
    UnknownElement { hom: String, elt: String },
    #[error("product {g} * {f}: {reason}")]
    BadProduct { g: String, f: String, reason: String },
    #[error("missing identity of {0}")]
    MissingIdentity(String),
    #[error("identity of {object}: {reason}")]
    BadIdentity { object: String, reason: String },
    #[error("composition is not associative on ({h}, {g}, {f})")]
    NonAssociative { h: String, g: String, f: String },
}

/// Unvalidated data of a graded category in index form.
#[derive(Clone, Debug)]
pub struct RawGraded<F> {
    pub base: CatRef,
    pub objects: Vec<FiberObj>,
    /// Basis names of `𝔞_u(A, A')`; absent keys are zero spaces.
    pub bases: HashMap<SharpKey, Vec<String>>,
    /// Product of basis elements `(i, j)` of `(g, f)` as a sparse vector in
    /// the hom over the composite; absent entries are zero.
    pub products: HashMap<(SharpKey, usize, SharpKey, usize), SparseVec<F>>,
    /// `1_A` in `𝔞_{1_U}(A, A)`, per object.
    pub identities: Vec<Option<SparseVec<F>>>,
}

/// A `U`-graded linear category with finitely many objects and
/// finite-dimensional hom spaces, stored over the sharp category `U^♯`.
#[derive(Clone, Debug)]
pub struct GradedCat<F: Scalar> {
    pub base: CatRef,
    objects: Vec<FiberObj>,
    fibers: Vec<Vec<usize>>,
    sharp: CatRef,
    keys: Vec<SharpKey>,
    key_index: HashMap<SharpKey, Mor>,
    bases: Vec<Vec<String>>,
    /// Per composable pair `(g, f)` of `U^♯` with nonzero spaces: column
    /// `i * dim f + j` holds `e_i ∘ e_j`.
    comp: HashMap<(Mor, Mor), Vec<SparseVec<F>>>,
    ids: Vec<SparseVec<F>>,
}

fn dense<F: Scalar>(v: &[(usize, F)], n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

fn sparse<F: Scalar>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

impl<F: Scalar> GradedCat<F> {
    /// Validates associativity and units on all basis triples.
    pub fn new(raw: RawGraded<F>) -> Result<GradedCat<F>, Vec<GradedError>> {
        let mut seen = HashSet::new();
        for o in &raw.objects {
            if !seen.insert(o.name.as_str()) {
                return Err(vec![GradedError::DuplicateObject(o.name.clone())]);
            }
            if o.over.0 >= raw.base.num_objects() {
                return Err(vec![GradedError::UnknownBaseObject(o.name.clone())]);
            }
        }
        for (i, id) in raw.identities.iter().enumerate().take(raw.objects.len()) {
            let key = (raw.base.id(raw.objects[i].over), i, i);
            let dim = raw.bases.get(&key).map_or(0, Vec::len);
            if id.is_none() && dim > 0 {
                return Err(vec![GradedError::MissingIdentity(raw.objects[i].name.clone())]);
            }
        }
        let cat = GradedCat::assemble(raw)?;
        let errs = cat.axiom_violations();
        if errs.is_empty() {
            Ok(cat)
        } else {
            Err(errs)
        }
    }

    /// Builds without checking the axioms; shapes are still checked.
    pub(crate) fn assemble(raw: RawGraded<F>) -> Result<GradedCat<F>, Vec<GradedError>> {
        if raw.identities.len() != raw.objects.len() {
            return Err(vec![GradedError::BadIdentity {
                object: String::new(),
                reason: format!(
                    "{} identities for {} objects",
                    raw.identities.len(),
                    raw.objects.len()
                ),
            }]);
        }
        let (sharp, keys, key_index) = sharp_category(&raw.base, &raw.objects);
        let mut fibers = vec![Vec::new(); raw.base.num_objects()];
        for (i, o) in raw.objects.iter().enumerate() {
            fibers[o.over.0].push(i);
        }
        let hom_name = |k: &SharpKey| {
            format!(
                "{}({},{})",
                raw.base.mor_name(k.0),
                raw.objects[k.1].name,
                raw.objects[k.2].name
            )
        };
        let mut bases = vec![Vec::new(); keys.len()];
        for (k, b) in &raw.bases {
            match key_index.get(k) {
                Some(m) => bases[m.0] = b.clone(),
                None => {
                    return Err(vec![GradedError::BadHom {
                        hom: format!("{}({},{})", raw.base.mor_name(k.0), k.1, k.2),
                        reason: "endpoints do not lie over the morphism".into(),
                    }])
                }
            }
            let mut names = HashSet::new();
            if !b.iter().all(|n| names.insert(n)) {
                return Err(vec![GradedError::BadHom {
                    hom: hom_name(k),
                    reason: "duplicate basis names".into(),
                }]);
            }
        }
        let sharp = Arc::new(sharp);
        let mut comp: HashMap<(Mor, Mor), Vec<SparseVec<F>>> = HashMap::new();
        for (&(gk, i, fk, j), v) in &raw.products {
            let (g, f) = match (key_index.get(&gk), key_index.get(&fk)) {
                (Some(&g), Some(&f)) => (g, f),
                _ => {
                    return Err(vec![GradedError::BadProduct {
                        g: format!("{gk:?}"),
                        f: format!("{fk:?}"),
                        reason: "unknown hom".into(),
                    }])
                }
            };
            let Some(gf) = sharp.compose(g, f) else {
                return Err(vec![GradedError::BadProduct {
                    g: hom_name(&gk),
                    f: hom_name(&fk),
                    reason: "not composable".into(),
                }]);
            };
            let (dg, df, dgf) = (bases[g.0].len(), bases[f.0].len(), bases[gf.0].len());
            if i >= dg || j >= df || v.iter().any(|(r, _)| *r >= dgf) {
                return Err(vec![GradedError::BadProduct {
                    g: hom_name(&gk),
                    f: hom_name(&fk),
                    reason: "index out of range".into(),
                }]);
            }
            let cols = comp
                .entry((g, f))
                .or_insert_with(|| vec![Vec::new(); dg * df]);
            let mut v = v.clone();
            v.retain(|(_, x)| !x.is_zero());
            v.sort_by_key(|e| e.0);
            cols[i * df + j] = v;
        }
        let mut ids = Vec::with_capacity(raw.objects.len());
        for (i, id) in raw.identities.iter().enumerate() {
            let m = key_index[&(raw.base.id(raw.objects[i].over), i, i)];
            let mut v = id.clone().unwrap_or_default();
            v.retain(|(_, x)| !x.is_zero());
            v.sort_by_key(|e| e.0);
            if v.iter().any(|(r, _)| *r >= bases[m.0].len()) {
                return Err(vec![GradedError::BadIdentity {
                    object: raw.objects[i].name.clone(),
                    reason: "index out of range".into(),
                }]);
            }
            ids.push(v);
        }
        Ok(GradedCat {
            base: raw.base,
            objects: raw.objects,
            fibers,
            sharp,
            keys,
            key_index,
            bases,
            comp,
            ids,
        })
    }

    pub(crate) fn axiom_violations(&self) -> Vec<GradedError> {
        let mut errs = Vec::new();
        let s = &self.sharp;
        for a in 0..self.objects.len() {
            let ida = self.identity_mor(a);
            let e = self.identity_vec(a);
            for &f in s.out_mors(Obj(a)) {
                // f ∘ 1_A = f
                for j in 0..self.dim(f) {
                    let got = self.compose_vec(f, &unit(self.dim(f), j), ida, &e);
                    if got != unit(self.dim(f), j) {
                        errs.push(GradedError::BadIdentity {
                            object: self.objects[a].name.clone(),
                            reason: format!("not a right unit for {}", self.elt_name(f, j)),
                        });
                        break;
                    }
                }
            }
            for f in s.hom_into(Obj(a)) {
                for j in 0..self.dim(f) {
                    let got = self.compose_vec(ida, &e, f, &unit(self.dim(f), j));
                    if got != unit(self.dim(f), j) {
                        errs.push(GradedError::BadIdentity {
                            object: self.objects[a].name.clone(),
                            reason: format!("not a left unit for {}", self.elt_name(f, j)),
                        });
                        break;
                    }
                }
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        for f in s.morphism_ids().filter(|&f| self.dim(f) > 0) {
            for &g in s.out_mors(s.tgt(f)).iter().filter(|&&g| self.dim(g) > 0) {
                let gf = s.compose(g, f).unwrap();
                for &h in s.out_mors(s.tgt(g)).iter().filter(|&&h| self.dim(h) > 0) {
                    let hg = s.compose(h, g).unwrap();
                    'triples: for i in 0..self.dim(h) {
                        for j in 0..self.dim(g) {
                            let x = self.product(hg, h, i, g, j);
                            for k in 0..self.dim(f) {
                                let left = self.compose_vec(hg, &x, f, &unit(self.dim(f), k));
                                let y = self.product(gf, g, j, f, k);
                                let right = self.compose_vec(h, &unit(self.dim(h), i), gf, &y);
                                if left != right {
                                    errs.push(GradedError::NonAssociative {
                                        h: self.elt_name(h, i),
                                        g: self.elt_name(g, j),
                                        f: self.elt_name(f, k),
                                    });
                                    break 'triples;
                                }
                            }
                        }
                    }
                }
            }
        }
        errs
    }

    /// The free graded category `kU`: one object over each base object and
    /// a one-dimensional hom over each morphism, named after it.
    pub fn free(base: &CatRef) -> GradedCat<F> {
        GradedCat::linearize(&Functor::identity(base))
    }

    /// Linearization of a category `C` graded over `U` through `p: C → U`:
    /// objects of `C` lie over their images, `𝔞_u(A, A')` is spanned by the
    /// morphisms `A → A'` over `u`.
    pub fn linearize(p: &Functor) -> GradedCat<F> {
        let c = &p.source;
        let objects = c
            .object_ids()
            .map(|o| FiberObj {
                name: c.obj_name(o).to_string(),
                over: p.obj(o),
            })
            .collect();
        let mut bases: HashMap<SharpKey, Vec<String>> = HashMap::new();
        let mut position: HashMap<Mor, usize> = HashMap::new();
        for m in c.morphism_ids() {
            let key = (p.mor(m), c.src(m).0, c.tgt(m).0);
            let b = bases.entry(key).or_default();
            position.insert(m, b.len());
            b.push(c.mor_name(m).to_string());
        }
        let mut products = HashMap::new();
        for f in c.morphism_ids() {
            for &g in c.out_mors(c.tgt(f)) {
                let gf = c.compose(g, f).unwrap();
                products.insert(
                    (
                        (p.mor(g), c.src(g).0, c.tgt(g).0),
                        position[&g],
                        (p.mor(f), c.src(f).0, c.tgt(f).0),
                        position[&f],
                    ),
                    vec![(position[&gf], F::one())],
                );
            }
        }
        let identities = c
            .object_ids()
            .map(|o| Some(vec![(position[&c.id(o)], F::one())]))
            .collect();
        GradedCat::assemble(RawGraded {
            base: p.target.clone(),
            objects,
            bases,
            products,
            identities,
        })
        .expect("linearization")
    }

    /// A finite-dimensional algebra as a category with one object `*` over
    /// the terminal category. `product(i, j)` is `e_i · e_j`.
    pub fn algebra(
        names: &[&str],
        product: impl Fn(usize, usize) -> Vec<F>,
        unit: Vec<F>,
    ) -> Result<GradedCat<F>, Vec<GradedError>> {
        let base = Arc::new(FinCat::terminal());
        let key = (Mor(0), 0, 0);
        let n = names.len();
        let mut products = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                products.insert((key, i, key, j), sparse(&product(i, j)));
            }
        }
        GradedCat::new(RawGraded {
            base,
            objects: vec![FiberObj {
                name: "*".into(),
                over: Obj(0),
            }],
            bases: [(key, names.iter().map(|s| s.to_string()).collect())].into(),
            products,
            identities: vec![Some(sparse(&unit))],
        })
    }

    /// `k[x]/(x^n)` with basis `1, x, …, x^{n-1}`.
    pub fn truncated_polynomial(n: usize) -> GradedCat<F> {
        assert!(n >= 1);
        let names: Vec<String> = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        GradedCat::algebra(
            &refs,
            |i, j| {
                let mut v = vec![F::zero(); n];
                if i + j < n {
                    v[i + j] = F::one();
                }
                v
            },
            unit(n, 0),
        )
        .expect("truncated polynomial algebra")
    }

    /// The ground field as an algebra.
    pub fn ground() -> GradedCat<F> {
        GradedCat::truncated_polynomial(1)
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[FiberObj] {
        &self.objects
    }

    pub fn obj_name(&self, a: usize) -> &str {
        &self.objects[a].name
    }

    pub fn over(&self, a: usize) -> Obj {
        self.objects[a].over
    }

    pub fn fiber(&self, u: Obj) -> &[usize] {
        &self.fibers[u.0]
    }

    pub fn find_object(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    pub fn underlying_set(&self) -> GradedSet {
        GradedSet {
            base: self.base.clone(),
            objects: self.objects.clone(),
        }
    }

    /// The sharp category `U^♯`; its objects are the objects of `self`.
    pub fn sharp_cat(&self) -> &CatRef {
        &self.sharp
    }

    pub fn key(&self, m: Mor) -> SharpKey {
        self.keys[m.0]
    }

    pub fn sharp_mor(&self, u: Mor, a: usize, b: usize) -> Option<Mor> {
        self.key_index.get(&(u, a, b)).copied()
    }

    pub fn dim(&self, m: Mor) -> usize {
        self.bases[m.0].len()
    }

    pub fn basis(&self, m: Mor) -> &[String] {
        &self.bases[m.0]
    }

    pub fn hom_name(&self, m: Mor) -> String {
        let (u, a, b) = self.keys[m.0];
        format!(
            "{}({},{})",
            self.base.mor_name(u),
            self.objects[a].name,
            self.objects[b].name
        )
    }

    pub fn elt_name(&self, m: Mor, i: usize) -> String {
        format!("{}@{}", self.bases[m.0][i], self.hom_name(m))
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn identity_mor(&self, a: usize) -> Mor {
        self.sharp.id(Obj(a))
    }

    pub fn identity_vec(&self, a: usize) -> Vec<F> {
        dense(&self.ids[a], self.dim(self.identity_mor(a)))
    }

    pub fn identity_sparse(&self, a: usize) -> &[(usize, F)] {
        &self.ids[a]
    }

    /// `e_i ∘ e_j` for basis elements of `g` and `f`, as a sparse vector in
    /// the hom over `g ∘ f`.
    pub fn product_sparse(&self, g: Mor, i: usize, f: Mor, j: usize) -> &[(usize, F)] {
        match self.comp.get(&(g, f)) {
            Some(cols) => &cols[i * self.dim(f) + j],
            None => &[],
        }
    }

    fn product(&self, gf: Mor, g: Mor, i: usize, f: Mor, j: usize) -> Vec<F> {
        dense(self.product_sparse(g, i, f, j), self.dim(gf))
    }

    /// `x ∘ y` for `x` over `g` and `y` over `f`.
    pub fn compose_vec(&self, g: Mor, x: &[F], f: Mor, y: &[F]) -> Vec<F> {
        let gf = self.sharp.compose(g, f).expect("composable sharp morphisms");
        let mut out = vec![F::zero(); self.dim(gf)];
        if let Some(cols) = self.comp.get(&(g, f)) {
            let df = self.dim(f);
            for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                    let ab = a.clone() * b.clone();
                    for (r, c) in &cols[i * df + j] {
                        out[*r] = out[*r].clone() + ab.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Structure constants of `(g, f)` as a `dim(gf) × (dim g · dim f)`
    /// matrix.
    pub fn comp_matrix(&self, g: Mor, f: Mor) -> Matrix<F> {
        let gf = self.sharp.compose(g, f).expect("composable sharp morphisms");
        let n = self.dim(g) * self.dim(f);
        let mut m = Matrix::zeros(self.dim(gf), n);
        if let Some(cols) = self.comp.get(&(g, f)) {
            for (c, col) in cols.iter().enumerate() {
                for (r, v) in col {
                    m.set(*r, c, v.clone());
                }
            }
        }
        m
    }

    /// Same shape and structure constants in the declared order; names are
    /// ignored.
    pub fn structurally_equal(&self, other: &GradedCat<F>) -> bool {
        *self.base == *other.base
            && self.objects.len() == other.objects.len()
            && self
                .objects
                .iter()
                .zip(&other.objects)
                .all(|(a, b)| a.over == b.over)
            && self.keys == other.keys
            && self
                .bases
                .iter()
                .zip(&other.bases)
                .all(|(a, b)| a.len() == b.len())
            && self.ids == other.ids
            && self.comp_nonzero() == other.comp_nonzero()
    }

    fn comp_nonzero(&self) -> BTreeMap<(Mor, Mor, usize), &SparseVec<F>> {
        let mut out = BTreeMap::new();
        for (&(g, f), cols) in &self.comp {
            for (c, v) in cols.iter().enumerate() {
                if !v.is_empty() {
                    out.insert((g, f, c), v);
                }
            }
        }
        out
    }

    /// Index-form data, e.g. for rebuilding with modifications.
    pub fn to_raw(&self) -> RawGraded<F> {
        let mut bases = HashMap::new();
        for (m, b) in self.bases.iter().enumerate() {
            if !b.is_empty() {
                bases.insert(self.keys[m], b.clone());
            }
        }
        let mut products = HashMap::new();
        for (&(g, f), cols) in &self.comp {
            let df = self.dim(f);
            for (c, v) in cols.iter().enumerate() {
                if !v.is_empty() {
                    products.insert((self.keys[g.0], c / df, self.keys[f.0], c % df), v.clone());
                }
            }
        }
        RawGraded {
            base: self.base.clone(),
            objects: self.objects.clone(),
            bases,
            products,
            identities: self.ids.iter().map(|v| Some(v.clone())).collect(),
        }
    }

    /// Same category with objects renamed.
    pub fn renamed(&self, name: impl Fn(usize) -> String) -> GradedCat<F> {
        let mut raw = self.to_raw();
        for (i, o) in raw.objects.iter_mut().enumerate() {
            o.name = name(i);
        }
        GradedCat::assemble(raw).expect("renaming keeps shape")
    }
}

pub(crate) fn unit<F: Scalar>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Hom space named by base morphism and endpoint objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomRef {
    pub mor: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpec {
    pub hom: HomRef,
    pub basis: Vec<String>,
}

/// `left ∘ right = result` on basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec<F> {
    pub left: (HomRef, String),
    pub right: (HomRef, String),
    pub result: Vec<(String, F)>,
}

/// Name-based description of a graded category over a given base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedCatSpec<F> {
    /// `(object, base object)`.
    pub objects: Vec<(String, String)>,
    pub homs: Vec<HomSpec>,
    pub products: Vec<ProductSpec<F>>,
    /// `(object, combination of basis elements of its identity hom)`.
    pub identities: Vec<(String, Vec<(String, F)>)>,
}

impl<F> Default for GradedCatSpec<F> {
    fn default() -> Self {
        GradedCatSpec {
            objects: Vec::new(),
            homs: Vec::new(),
            products: Vec::new(),
            identities: Vec::new(),
        }
    }
}

impl<F: Scalar> GradedCat<F> {
    pub fn from_spec(base: &CatRef, spec: &GradedCatSpec<F>) -> Result<GradedCat<F>, Vec<GradedError>> {
        let mut objects = Vec::new();
        for (name, over) in &spec.objects {
            let over = base
                .find_object(over)
                .ok_or_else(|| vec![GradedError::UnknownBaseObject(over.clone())])?;
            objects.push(FiberObj {
                name: name.clone(),
                over,
            });
        }
        let obj = |n: &str| {
            objects
                .iter()
                .position(|o| o.name == n)
                .ok_or_else(|| vec![GradedError::UnknownObject(n.to_string())])
        };
        let key_of = |h: &HomRef| -> Result<SharpKey, Vec<GradedError>> {
            let u = base
                .find_morphism(&h.mor)
                .ok_or_else(|| vec![GradedError::UnknownBaseMorphism(h.mor.clone())])?;
            Ok((u, obj(&h.src)?, obj(&h.tgt)?))
        };
        let hom_label = |h: &HomRef| format!("{}({},{})", h.mor, h.src, h.tgt);
        let mut bases: HashMap<SharpKey, Vec<String>> = HashMap::new();
        for h in &spec.homs {
            let k = key_of(&h.hom)?;
            if bases.insert(k, h.basis.clone()).is_some() {
                return Err(vec![GradedError::BadHom {
                    hom: hom_label(&h.hom),
                    reason: "declared twice".into(),
                }]);
            }
        }
        let position = |h: &HomRef, k: &SharpKey, e: &str| -> Result<usize, Vec<GradedError>> {
            bases
                .get(k)
                .and_then(|b| b.iter().position(|x| x == e))
                .ok_or_else(|| {
                    vec![GradedError::UnknownElement {
                        hom: hom_label(h),
                        elt: e.to_string(),
                    }]
                })
        };
        let mut products = HashMap::new();
        for p in &spec.products {
            let gk = key_of(&p.left.0)?;
            let fk = key_of(&p.right.0)?;
            if gk.1 != fk.2 {
                return Err(vec![GradedError::BadProduct {
                    g: hom_label(&p.left.0),
                    f: hom_label(&p.right.0),
                    reason: "not composable".into(),
                }]);
            }
            let i = position(&p.left.0, &gk, &p.left.1)?;
            let j = position(&p.right.0, &fk, &p.right.1)?;
            let gf = (base.compose(gk.0, fk.0).unwrap(), fk.1, gk.2);
            let gf_ref = HomRef {
                mor: base.mor_name(gf.0).to_string(),
                src: objects[gf.1].name.clone(),
                tgt: objects[gf.2].name.clone(),
            };
            let mut v = Vec::new();
            for (e, c) in &p.result {
                v.push((position(&gf_ref, &gf, e)?, c.clone()));
            }
            if products.insert((gk, i, fk, j), v).is_some() {
                return Err(vec![GradedError::BadProduct {
                    g: hom_label(&p.left.0),
                    f: hom_label(&p.right.0),
                    reason: format!("{} * {} declared twice", p.left.1, p.right.1),
                }]);
            }
        }
        let mut identities = vec![None; objects.len()];
        for (o, v) in &spec.identities {
            let a = obj(o)?;
            let k = (base.id(objects[a].over), a, a);
            let href = HomRef {
                mor: base.mor_name(k.0).to_string(),
                src: o.clone(),
                tgt: o.clone(),
            };
            let mut s = Vec::new();
            for (e, c) in v {
                s.push((position(&href, &k, e)?, c.clone()));
            }
            identities[a] = Some(s);
        }
        GradedCat::new(RawGraded {
            base: base.clone(),
            objects,
            bases,
            products,
            identities,
        })
    }

    /// Name-based description; products are listed for nonzero results
    /// only.
    pub fn to_spec(&self) -> GradedCatSpec<F> {
        let href = |m: Mor| {
            let (u, a, b) = self.keys[m.0];
            HomRef {
                mor: self.base.mor_name(u).to_string(),
                src: self.objects[a].name.clone(),
                tgt: self.objects[b].name.clone(),
            }
        };
        let mut spec = GradedCatSpec {
            objects: self
                .objects
                .iter()
                .map(|o| (o.name.clone(), self.base.obj_name(o.over).to_string()))
                .collect(),
            ..Default::default()
        };
        for m in self.sharp.morphism_ids().filter(|&m| self.dim(m) > 0) {
            spec.homs.push(HomSpec {
                hom: href(m),
                basis: self.bases[m.0].clone(),
            });
        }
        let mut pairs: Vec<&(Mor, Mor)> = self.comp.keys().collect();
        pairs.sort();
        for &(g, f) in pairs {
            let gf = self.sharp.compose(g, f).unwrap();
            let df = self.dim(f);
            for (c, v) in self.comp[&(g, f)].iter().enumerate() {
                if v.is_empty() {
                    continue;
                }
                spec.products.push(ProductSpec {
                    left: (href(g), self.bases[g.0][c / df].clone()),
                    right: (href(f), self.bases[f.0][c % df].clone()),
                    result: v
                        .iter()
                        .map(|(r, x)| (self.bases[gf.0][*r].clone(), x.clone()))
                        .collect(),
                });
            }
        }
        for (a, v) in self.ids.iter().enumerate() {
            if !v.is_empty() {
                let m = self.identity_mor(a);
                spec.identities.push((
                    self.objects[a].name.clone(),
                    v.iter()
                        .map(|(r, x)| (self.bases[m.0][*r].clone(), x.clone()))
                        .collect(),
                ));
            }
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn free_category_is_valid() {
        let u = Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap());
        let a: GradedCat<Q> = GradedCat::free(&u);
        assert!(a.axiom_violations().is_empty());
        assert_eq!(a.total_dim(), u.num_morphisms());
        assert_eq!(a.sharp_cat().num_morphisms(), u.num_morphisms());
    }

    #[test]
    fn dual_numbers_and_variants() {
        let a: GradedCat<Q> = GradedCat::truncated_polynomial(2);
        assert!(a.axiom_violations().is_empty());
        // x·x = 1 gives k[x]/(x²−1), still valid
        let b = GradedCat::<Q>::algebra(
            &["1", "x"],
            |i, j| if (i + j) % 2 == 0 { vec![q(1), q(0)] } else { vec![q(0), q(1)] },
            vec![q(1), q(0)],
        );
        assert!(b.is_ok());
        let broken = GradedCat::<Q>::algebra(
            &["1", "x"],
            |i, j| match (i, j) {
                (0, k) | (k, 0) => unit(2, k),
                _ => vec![q(0), q(0)],
            },
            vec![q(2), q(0)],
        );
        match broken {
            Err(e) => assert!(matches!(e[0], GradedError::BadIdentity { .. })),
            Ok(_) => panic!("broken unit accepted"),
        }
    }

    #[test]
    fn non_associative_product_is_named() {
        // basis 1, x, y with x·x = y, x·y = 0, y·x = x: (x·x)·x = y·x = x, x·(x·x) = x·y = 0
        let r = GradedCat::<Q>::algebra(
            &["1", "x", "y"],
            |i, j| match (i, j) {
                (0, k) | (k, 0) => unit(3, k),
                (1, 1) => unit(3, 2),
                (2, 1) => unit(3, 1),
                _ => vec![q(0); 3],
            },
            unit(3, 0),
        );
        match r {
            Err(e) => assert!(e.iter().any(|x| matches!(x, GradedError::NonAssociative { .. }))),
            Ok(_) => panic!("non-associative product accepted"),
        }
    }

    #[test]
    fn spec_round_trip() {
        let a: GradedCat<Q> = GradedCat::free(&Arc::new(FinCat::chain(2)));
        let spec = a.to_spec();
        let b = GradedCat::from_spec(&a.base, &spec).unwrap();
        assert!(a.structurally_equal(&b));
        assert_eq!(b.to_spec(), spec);
    }

    #[test]
    fn spec_errors() {
        let base = Arc::new(FinCat::terminal());
        let mut spec: GradedCatSpec<Q> = GradedCat::truncated_polynomial(2).to_spec();
        spec.objects.push(("*".into(), "*".into()));
        assert!(matches!(
            GradedCat::from_spec(&base, &spec).unwrap_err()[0],
            GradedError::DuplicateObject(_)
        ));
        let mut spec: GradedCatSpec<Q> = GradedCat::truncated_polynomial(2).to_spec();
        spec.identities.clear();
        assert!(matches!(
            GradedCat::from_spec(&base, &spec).unwrap_err()[0],
            GradedError::MissingIdentity(_)
        ));
    }

    #[test]
    fn sharp_of_graded_set() {
        let base = Arc::new(FinCat::chain(1));
        let x = GradedSet {
            base: base.clone(),
            objects: vec![
                FiberObj { name: "a".into(), over: Obj(0) },
                FiberObj { name: "b".into(), over: Obj(0) },
                FiberObj { name: "c".into(), over: Obj(1) },
            ],
        };
        let (cat, set, forget) = x.sharp();
        assert_eq!(cat.num_objects(), 3);
        assert_eq!(cat.num_morphisms(), 4 + 1 + 2);
        assert!(set.objects.iter().enumerate().all(|(i, o)| o.over == Obj(i)));
        assert_eq!(forget.obj(Obj(2)), Obj(1));
    }
}
