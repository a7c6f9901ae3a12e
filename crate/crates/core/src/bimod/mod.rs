//! Bimodules over graded categories: validation, tensor products, Hom
//! bimodules, restriction, supports over ideals and arrow categories.

mod arrow;
mod hom;
mod support;
mod tensor;

pub use arrow::{arrow_category, ArrowCategory};
pub use hom::{canonical_to_hom, hom_bimodules, hom_op, morphism_space, HomBimodule, MorphismSpace};
pub use support::{support_split, SupportSplit};
pub use tensor::{tensor, Tensor};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{Mor, Obj, SetBifunctor};
pub(crate) use crate::mapgraded::unit;
use crate::mapgraded::{GradedCat, GradedFunctor, SparseVec};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

/// A space `M_s(B, A)`: element `s` of the carrier, object `B` of the right
/// category, object `A` of the left category.
pub type BimodKey = (usize, usize, usize);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BimodError {
    #[error("space {0} does not lie over its element")]
    BadSpace(String),
    #[error("action {action} on {space}: {reason}")]
    BadAction {
        action: String,
        space: String,
        reason: String,
    },
    #[error("identity of {object} does not act trivially on {space}")]
    NotUnital { object: String, space: String },
    #[error("actions not associative on ({first}, {second}, {third})")]
    NonAssociative {
        first: String,
        second: String,
        third: String,
    },
    #[error("middle categories differ")]
    MiddleMismatch,
    #[error("bimodules have different shapes")]
    ShapeMismatch,
    #[error("not an ideal-subcategory decomposition")]
    NotADecomposition,
}

/// Index-form data of a bimodule; action columns are sparse vectors in the
/// target space. Left keys are `(sharp morphism of left, i, space, j)`,
/// right keys `(space, i, sharp morphism of right, j)`.
#[derive(Clone, Debug)]
pub struct RawBimodule<F: Scalar> {
    pub left: Arc<GradedCat<F>>,
    pub right: Arc<GradedCat<F>>,
    pub carrier: Arc<SetBifunctor>,
    pub bases: HashMap<BimodKey, Vec<String>>,
    pub left_act: HashMap<(Mor, usize, BimodKey, usize), SparseVec<F>>,
    pub right_act: HashMap<(BimodKey, usize, Mor, usize), SparseVec<F>>,
}

/// An `𝔞`-`S`-`𝔟`-bimodule: `left = 𝔞` over `U`, `right = 𝔟` over `V` and a
/// `U`-`V`-bifunctor `S`.
#[derive(Clone, Debug)]
pub struct Bimodule<F: Scalar> {
    pub left: Arc<GradedCat<F>>,
    pub right: Arc<GradedCat<F>>,
    pub carrier: Arc<SetBifunctor>,
    keys: Vec<BimodKey>,
    key_index: HashMap<BimodKey, usize>,
    bases: Vec<Vec<String>>,
    /// `(g, k)`: column `i * dim k + j` is `e_i · m_j`.
    left_act: HashMap<(Mor, usize), Vec<SparseVec<F>>>,
    /// `(k, h)`: column `i * dim h + j` is `m_i · e_j`.
    right_act: HashMap<(usize, Mor), Vec<SparseVec<F>>>,
}

pub(crate) fn to_sparse<F: Scalar>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

fn columns_matrix<F: Scalar>(rows: usize, cols: &[SparseVec<F>], pick: impl Iterator<Item = usize>) -> Matrix<F> {
    let picked: Vec<usize> = pick.collect();
    let mut m = Matrix::zeros(rows, picked.len());
    for (c, &src) in picked.iter().enumerate() {
        for (r, v) in &cols[src] {
            m.set(*r, c, v.clone());
        }
    }
    m
}

fn bimodule_keys(left: &GradedCat<impl Scalar>, right: &GradedCat<impl Scalar>, s: &SetBifunctor) -> Vec<BimodKey> {
    let mut keys = Vec::new();
    for (e, el) in s.elems().iter().enumerate() {
        for &b in right.fiber(el.src) {
            for &a in left.fiber(el.tgt) {
                keys.push((e, b, a));
            }
        }
    }
    keys
}

impl<F: Scalar> Bimodule<F> {
    /// Validates unit and associativity axioms on all basis triples.
    pub fn new(raw: RawBimodule<F>) -> Result<Bimodule<F>, Vec<BimodError>> {
        let m = Bimodule::assemble(raw)?;
        let errs = m.axiom_violations();
        if errs.is_empty() {
            Ok(m)
        } else {
            Err(errs)
        }
    }

    pub(crate) fn assemble(raw: RawBimodule<F>) -> Result<Bimodule<F>, Vec<BimodError>> {
        let (a, b, s) = (&raw.left, &raw.right, &raw.carrier);
        if *s.left != *a.base || *s.right != *b.base {
            return Err(vec![BimodError::ShapeMismatch]);
        }
        let keys = bimodule_keys(a, b, s);
        let key_index: HashMap<BimodKey, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let label = |k: &BimodKey| format!("{}({},{})", s.elem(k.0).name, b.obj_name(k.1), a.obj_name(k.2));
        let mut bases = vec![Vec::new(); keys.len()];
        for (k, names) in &raw.bases {
            let Some(&i) = key_index.get(k) else {
                return Err(vec![BimodError::BadSpace(format!("{k:?}"))]);
            };
            let mut seen = HashSet::new();
            if !names.iter().all(|n| seen.insert(n)) {
                return Err(vec![BimodError::BadSpace(format!("{}: duplicate basis names", label(k)))]);
            }
            bases[i] = names.clone();
        }
        let bad = |action: String, space: String, reason: &str| {
            vec![BimodError::BadAction {
                action,
                space,
                reason: reason.into(),
            }]
        };
        let mut left_act: HashMap<(Mor, usize), Vec<SparseVec<F>>> = HashMap::new();
        for (&(g, i, k, j), v) in &raw.left_act {
            let Some(&ki) = key_index.get(&k) else {
                return Err(bad(format!("{g:?}"), format!("{k:?}"), "unknown space"));
            };
            if g.0 >= a.sharp_cat().num_morphisms() {
                return Err(bad(format!("{g:?}"), label(&k), "unknown morphism"));
            }
            let (u, src, tgt) = a.key(g);
            if src != k.2 {
                return Err(bad(a.hom_name(g), label(&k), "not composable"));
            }
            let target = key_index[&(s.act_left(u, k.0), k.1, tgt)];
            let (dg, dk, dt) = (a.dim(g), bases[ki].len(), bases[target].len());
            if i >= dg || j >= dk || v.iter().any(|(r, _)| *r >= dt) {
                return Err(bad(a.hom_name(g), label(&k), "index out of range"));
            }
            let cols = left_act.entry((g, ki)).or_insert_with(|| vec![Vec::new(); dg * dk]);
            let mut v = v.clone();
            v.retain(|(_, x)| !x.is_zero());
            v.sort_by_key(|e| e.0);
            cols[i * dk + j] = v;
        }
        let mut right_act: HashMap<(usize, Mor), Vec<SparseVec<F>>> = HashMap::new();
        for (&(k, i, h, j), v) in &raw.right_act {
            let Some(&ki) = key_index.get(&k) else {
                return Err(bad(format!("{h:?}"), format!("{k:?}"), "unknown space"));
            };
            if h.0 >= b.sharp_cat().num_morphisms() {
                return Err(bad(format!("{h:?}"), label(&k), "unknown morphism"));
            }
            let (v_mor, src, tgt) = b.key(h);
            if tgt != k.1 {
                return Err(bad(b.hom_name(h), label(&k), "not composable"));
            }
            let target = key_index[&(s.act_right(k.0, v_mor), src, k.2)];
            let (dk, dh, dt) = (bases[ki].len(), b.dim(h), bases[target].len());
            if i >= dk || j >= dh || v.iter().any(|(r, _)| *r >= dt) {
                return Err(bad(b.hom_name(h), label(&k), "index out of range"));
            }
            let cols = right_act.entry((ki, h)).or_insert_with(|| vec![Vec::new(); dk * dh]);
            let mut v = v.clone();
            v.retain(|(_, x)| !x.is_zero());
            v.sort_by_key(|e| e.0);
            cols[i * dh + j] = v;
        }
        Ok(Bimodule {
            left: raw.left,
            right: raw.right,
            carrier: raw.carrier,
            keys,
            key_index,
            bases,
            left_act,
            right_act,
        })
    }

    pub(crate) fn axiom_violations(&self) -> Vec<BimodError> {
        let (a, b) = (&self.left, &self.right);
        let mut errs = Vec::new();
        for k in 0..self.keys.len() {
            let (_, bo, ao) = self.keys[k];
            let id = Matrix::identity(self.dim(k));
            let l = self.left_action(a.identity_mor(ao), &a.identity_vec(ao), k);
            if l != id {
                errs.push(BimodError::NotUnital {
                    object: a.obj_name(ao).to_string(),
                    space: self.space_name(k),
                });
            }
            let r = self.right_action(k, b.identity_mor(bo), &b.identity_vec(bo));
            if r != id {
                errs.push(BimodError::NotUnital {
                    object: b.obj_name(bo).to_string(),
                    space: self.space_name(k),
                });
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        let asc = a.sharp_cat();
        let bsc = b.sharp_cat();
        for k in (0..self.keys.len()).filter(|&k| self.dim(k) > 0) {
            let (_, bo, ao) = self.keys[k];
            // (g' g) m = g' (g m)
            for &g in asc.out_mors(Obj(ao)).iter().filter(|&&g| a.dim(g) > 0) {
                let gk = self.left_target(g, k);
                for &g2 in asc.out_mors(asc.tgt(g)).iter().filter(|&&g2| a.dim(g2) > 0) {
                    let gg = asc.compose(g2, g).unwrap();
                    for i in 0..a.dim(g2) {
                        for j in 0..a.dim(g) {
                            let x = a.compose_vec(g2, &unit(a.dim(g2), i), g, &unit(a.dim(g), j));
                            let lhs = self.left_action(gg, &x, k);
                            let rhs = self
                                .left_action(g2, &unit(a.dim(g2), i), gk)
                                .mul(&self.left_action(g, &unit(a.dim(g), j), k));
                            if lhs != rhs {
                                errs.push(BimodError::NonAssociative {
                                    first: a.elt_name(g2, i),
                                    second: a.elt_name(g, j),
                                    third: self.space_name(k),
                                });
                                return errs;
                            }
                        }
                    }
                }
            }
            // m (h h') = (m h) h'
            for h in b.sharp_cat().hom_into(Obj(bo)).into_iter().filter(|&h| b.dim(h) > 0) {
                let kh = self.right_target(k, h);
                for h2 in bsc.hom_into(bsc.src(h)).into_iter().filter(|&h2| b.dim(h2) > 0) {
                    let hh = bsc.compose(h, h2).unwrap();
                    for i in 0..b.dim(h) {
                        for j in 0..b.dim(h2) {
                            let y = b.compose_vec(h, &unit(b.dim(h), i), h2, &unit(b.dim(h2), j));
                            let lhs = self.right_action(k, hh, &y);
                            let rhs = self
                                .right_action(kh, h2, &unit(b.dim(h2), j))
                                .mul(&self.right_action(k, h, &unit(b.dim(h), i)));
                            if lhs != rhs {
                                errs.push(BimodError::NonAssociative {
                                    first: self.space_name(k),
                                    second: b.elt_name(h, i),
                                    third: b.elt_name(h2, j),
                                });
                                return errs;
                            }
                        }
                    }
                }
            }
            // (g m) h = g (m h)
            for &g in asc.out_mors(Obj(ao)).iter().filter(|&&g| a.dim(g) > 0) {
                let gk = self.left_target(g, k);
                for h in bsc.hom_into(Obj(bo)).into_iter().filter(|&h| b.dim(h) > 0) {
                    let kh = self.right_target(k, h);
                    for i in 0..a.dim(g) {
                        for j in 0..b.dim(h) {
                            let (ei, ej) = (unit(a.dim(g), i), unit(b.dim(h), j));
                            let lhs = self.right_action(gk, h, &ej).mul(&self.left_action(g, &ei, k));
                            let rhs = self.left_action(g, &ei, kh).mul(&self.right_action(k, h, &ej));
                            if lhs != rhs {
                                errs.push(BimodError::NonAssociative {
                                    first: a.elt_name(g, i),
                                    second: self.space_name(k),
                                    third: b.elt_name(h, j),
                                });
                                return errs;
                            }
                        }
                    }
                }
            }
        }
        errs
    }

    /// `1_𝔞`: spaces `𝔞_u(A, A')`, actions by composition.
    pub fn identity(a: &Arc<GradedCat<F>>) -> Bimodule<F> {
        let carrier = Arc::new(SetBifunctor::identity(&a.base));
        let mut raw = RawBimodule {
            left: a.clone(),
            right: a.clone(),
            carrier,
            bases: HashMap::new(),
            left_act: HashMap::new(),
            right_act: HashMap::new(),
        };
        let sc = a.sharp_cat();
        let key_of = |m: Mor| {
            let (u, x, y) = a.key(m);
            (u.0, x, y)
        };
        for m in sc.morphism_ids().filter(|&m| a.dim(m) > 0) {
            raw.bases.insert(key_of(m), a.basis(m).to_vec());
        }
        for f in sc.morphism_ids().filter(|&f| a.dim(f) > 0) {
            for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| a.dim(g) > 0) {
                for i in 0..a.dim(g) {
                    for j in 0..a.dim(f) {
                        let v = a.product_sparse(g, i, f, j).to_vec();
                        if !v.is_empty() {
                            raw.left_act.insert((g, i, key_of(f), j), v.clone());
                            raw.right_act.insert((key_of(g), i, f, j), v);
                        }
                    }
                }
            }
        }
        Bimodule::assemble(raw).expect("identity bimodule")
    }

    /// The zero bimodule on a carrier.
    pub fn zero(
        left: &Arc<GradedCat<F>>,
        right: &Arc<GradedCat<F>>,
        carrier: &Arc<SetBifunctor>,
    ) -> Bimodule<F> {
        Bimodule::assemble(RawBimodule {
            left: left.clone(),
            right: right.clone(),
            carrier: carrier.clone(),
            bases: HashMap::new(),
            left_act: HashMap::new(),
            right_act: HashMap::new(),
        })
        .expect("zero bimodule")
    }

    /// `M_F` for `F: 𝔟 → 𝔞` over `φ`: `(M_F)_s(B, A) = 𝔞_s(F B, A)` over
    /// `S_φ`.
    pub fn lower(f: &GradedFunctor<F>) -> Bimodule<F> {
        let (a, b) = (&f.target, &f.source);
        let carrier = Arc::new(SetBifunctor::lower(&f.base));
        let keys = bimodule_keys(a, b, &carrier);
        // element s = (V, u) with u: φV → U
        let sharp_of = |k: &BimodKey| {
            let u = base_mor_of_lower(&f.base, &carrier, k.0);
            a.sharp_mor(u, f.obj(k.1), k.2).unwrap()
        };
        let mut raw = RawBimodule {
            left: a.clone(),
            right: b.clone(),
            carrier: carrier.clone(),
            bases: HashMap::new(),
            left_act: HashMap::new(),
            right_act: HashMap::new(),
        };
        let index: HashMap<BimodKey, Mor> = keys.iter().map(|k| (*k, sharp_of(k))).collect();
        for k in &keys {
            let m = index[k];
            if a.dim(m) > 0 {
                raw.bases.insert(*k, a.basis(m).to_vec());
            }
        }
        let asc = a.sharp_cat();
        let bsc = b.sharp_cat();
        for k in &keys {
            let m = index[k];
            if a.dim(m) == 0 {
                continue;
            }
            for &g in asc.out_mors(asc.tgt(m)).iter().filter(|&&g| a.dim(g) > 0) {
                for i in 0..a.dim(g) {
                    for j in 0..a.dim(m) {
                        let v = a.product_sparse(g, i, m, j).to_vec();
                        if !v.is_empty() {
                            raw.left_act.insert((g, i, *k, j), v);
                        }
                    }
                }
            }
            for h in bsc.hom_into(Obj(k.1)).into_iter().filter(|&h| b.dim(h) > 0) {
                let fh = f.image_mor(h);
                let hmat = f.hom(h);
                for i in 0..a.dim(m) {
                    for j in 0..b.dim(h) {
                        let v = a.compose_vec(m, &unit(a.dim(m), i), fh, &hmat.column(j));
                        let v = to_sparse(&v);
                        if !v.is_empty() {
                            raw.right_act.insert((*k, i, h, j), v);
                        }
                    }
                }
            }
        }
        Bimodule::assemble(raw).expect("bimodule of a functor")
    }

    /// `M^F` for `F: 𝔞 → 𝔟` over `φ`: `(M^F)_s(B, A) = 𝔟_s(B, F A)` over
    /// `S^φ`.
    pub fn upper(f: &GradedFunctor<F>) -> Bimodule<F> {
        let (a, b) = (&f.source, &f.target);
        let carrier = Arc::new(SetBifunctor::upper(&f.base));
        let keys = bimodule_keys(a, b, &carrier);
        let sharp_of = |k: &BimodKey| {
            let v = base_mor_of_upper(&f.base, &carrier, k.0);
            b.sharp_mor(v, k.1, f.obj(k.2)).unwrap()
        };
        let mut raw = RawBimodule {
            left: a.clone(),
            right: b.clone(),
            carrier: carrier.clone(),
            bases: HashMap::new(),
            left_act: HashMap::new(),
            right_act: HashMap::new(),
        };
        let index: HashMap<BimodKey, Mor> = keys.iter().map(|k| (*k, sharp_of(k))).collect();
        for k in &keys {
            let m = index[k];
            if b.dim(m) > 0 {
                raw.bases.insert(*k, b.basis(m).to_vec());
            }
        }
        let asc = a.sharp_cat();
        let bsc = b.sharp_cat();
        for k in &keys {
            let m = index[k];
            if b.dim(m) == 0 {
                continue;
            }
            for &g in asc.out_mors(Obj(k.2)).iter().filter(|&&g| a.dim(g) > 0) {
                let fg = f.image_mor(g);
                let gmat = f.hom(g);
                for i in 0..a.dim(g) {
                    for j in 0..b.dim(m) {
                        let v = b.compose_vec(fg, &gmat.column(i), m, &unit(b.dim(m), j));
                        let v = to_sparse(&v);
                        if !v.is_empty() {
                            raw.left_act.insert((g, i, *k, j), v);
                        }
                    }
                }
            }
            for h in bsc.hom_into(bsc.src(m)).into_iter().filter(|&h| b.dim(h) > 0) {
                for i in 0..b.dim(m) {
                    for j in 0..b.dim(h) {
                        let v = b.product_sparse(m, i, h, j).to_vec();
                        if !v.is_empty() {
                            raw.right_act.insert((*k, i, h, j), v);
                        }
                    }
                }
            }
        }
        Bimodule::assemble(raw).expect("bimodule of a functor")
    }

    pub fn num_spaces(&self) -> usize {
        self.keys.len()
    }

    pub fn key(&self, k: usize) -> BimodKey {
        self.keys[k]
    }

    pub fn keys(&self) -> &[BimodKey] {
        &self.keys
    }

    pub fn find(&self, key: BimodKey) -> Option<usize> {
        self.key_index.get(&key).copied()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases[k].len()
    }

    pub fn basis(&self, k: usize) -> &[String] {
        &self.bases[k]
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn space_name(&self, k: usize) -> String {
        let (s, b, a) = self.keys[k];
        format!(
            "{}({},{})",
            self.carrier.elem(s).name,
            self.right.obj_name(b),
            self.left.obj_name(a)
        )
    }

    /// Space of `g · m` for `m` in space `k`.
    pub fn left_target(&self, g: Mor, k: usize) -> usize {
        let (u, _, tgt) = self.left.key(g);
        let (s, b, _) = self.keys[k];
        self.key_index[&(self.carrier.act_left(u, s), b, tgt)]
    }

    /// Space of `m · h` for `m` in space `k`.
    pub fn right_target(&self, k: usize, h: Mor) -> usize {
        let (v, src, _) = self.right.key(h);
        let (s, _, a) = self.keys[k];
        self.key_index[&(self.carrier.act_right(s, v), src, a)]
    }

    /// Matrix of `m ↦ x · m` on space `k`, for `x` over the sharp morphism
    /// `g` of the left category.
    pub fn left_action(&self, g: Mor, x: &[F], k: usize) -> Matrix<F> {
        let t = self.left_target(g, k);
        let dk = self.dim(k);
        let mut out = Matrix::zeros(self.dim(t), dk);
        if let Some(cols) = self.left_act.get(&(g, k)) {
            for (i, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for j in 0..dk {
                    for (r, v) in &cols[i * dk + j] {
                        out.add_at(*r, j, c.clone() * v.clone());
                    }
                }
            }
        }
        out
    }

    /// Matrix of `m ↦ m · y` on space `k`, for `y` over the sharp morphism
    /// `h` of the right category.
    pub fn right_action(&self, k: usize, h: Mor, y: &[F]) -> Matrix<F> {
        let t = self.right_target(k, h);
        let (dk, dh) = (self.dim(k), self.right.dim(h));
        let mut out = Matrix::zeros(self.dim(t), dk);
        if let Some(cols) = self.right_act.get(&(k, h)) {
            for (j, c) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for i in 0..dk {
                    for (r, v) in &cols[i * dh + j] {
                        out.add_at(*r, i, c.clone() * v.clone());
                    }
                }
            }
        }
        out
    }

    /// Structure constants of the left action of `g` on space `k`:
    /// `dim(g·k) × (dim g · dim k)`.
    pub fn left_matrix(&self, g: Mor, k: usize) -> Matrix<F> {
        let t = self.left_target(g, k);
        let n = self.left.dim(g) * self.dim(k);
        match self.left_act.get(&(g, k)) {
            Some(cols) => columns_matrix(self.dim(t), cols, 0..n),
            None => Matrix::zeros(self.dim(t), n),
        }
    }

    /// Structure constants of the right action of `h` on space `k`:
    /// `dim(k·h) × (dim k · dim h)`.
    pub fn right_matrix(&self, k: usize, h: Mor) -> Matrix<F> {
        let t = self.right_target(k, h);
        let n = self.dim(k) * self.right.dim(h);
        match self.right_act.get(&(k, h)) {
            Some(cols) => columns_matrix(self.dim(t), cols, 0..n),
            None => Matrix::zeros(self.dim(t), n),
        }
    }

    pub fn to_raw(&self) -> RawBimodule<F> {
        let mut raw = RawBimodule {
            left: self.left.clone(),
            right: self.right.clone(),
            carrier: self.carrier.clone(),
            bases: HashMap::new(),
            left_act: HashMap::new(),
            right_act: HashMap::new(),
        };
        for (k, b) in self.bases.iter().enumerate() {
            if !b.is_empty() {
                raw.bases.insert(self.keys[k], b.clone());
            }
        }
        for (&(g, k), cols) in &self.left_act {
            let dk = self.dim(k);
            for (c, v) in cols.iter().enumerate().filter(|(_, v)| !v.is_empty()) {
                raw.left_act.insert((g, c / dk, self.keys[k], c % dk), v.clone());
            }
        }
        for (&(k, h), cols) in &self.right_act {
            let dh = self.right.dim(h);
            for (c, v) in cols.iter().enumerate().filter(|(_, v)| !v.is_empty()) {
                raw.right_act.insert((self.keys[k], c / dh, h, c % dh), v.clone());
            }
        }
        raw
    }

    /// Same keys, dimensions and action constants; names ignored.
    pub fn structurally_equal(&self, other: &Bimodule<F>) -> bool {
        self.keys == other.keys
            && *self.carrier == *other.carrier
            && self.bases.iter().zip(&other.bases).all(|(x, y)| x.len() == y.len())
            && nonzero(&self.left_act) == nonzero(&other.left_act)
            && nonzero(&self.right_act) == nonzero(&other.right_act)
    }

    /// Whether the carrier is the identity bifunctor of a common base and
    /// both sides are the same category.
    pub fn is_over_identity(&self) -> bool {
        Arc::ptr_eq(&self.left, &self.right) && *self.carrier == SetBifunctor::identity(&self.left.base)
    }

    /// For a bimodule over `1_U`: the space over the base morphism `u`
    /// from `B` to `A`.
    pub fn space_over(&self, u: Mor, b: usize, a: usize) -> usize {
        self.key_index[&(u.0, b, a)]
    }
}

fn nonzero<K: Ord + Copy, F: Scalar>(m: &HashMap<K, Vec<SparseVec<F>>>) -> std::collections::BTreeMap<(K, usize), &SparseVec<F>> {
    let mut out = std::collections::BTreeMap::new();
    for (k, cols) in m {
        for (c, v) in cols.iter().enumerate() {
            if !v.is_empty() {
                out.insert((*k, c), v);
            }
        }
    }
    out
}

/// The base morphism `φV → U` of an element of `S_φ`.
fn base_mor_of_lower(phi: &crate::fincat::Functor, s: &SetBifunctor, e: usize) -> Mor {
    let el = s.elem(e);
    let u = &phi.target;
    // elements are listed by V object, then outgoing morphism of φV
    let before: usize = (0..el.src.0).map(|v| u.out_mors(phi.obj(Obj(v))).len()).sum();
    u.out_mors(phi.obj(el.src))[e - before]
}

/// The base morphism `V → φU` of an element of `S^φ`.
fn base_mor_of_upper(phi: &crate::fincat::Functor, s: &SetBifunctor, e: usize) -> Mor {
    let el = s.elem(e);
    let v = &phi.target;
    let before: usize = (0..el.tgt.0).map(|a| v.hom_into(phi.obj(Obj(a))).len()).sum();
    v.hom_into(phi.obj(el.tgt))[e - before]
}

/// `F*M` for `F: 𝔟 → 𝔞` over `φ` and an `𝔞`-bimodule `M` over `1_U`:
/// `(F*M)_v(B, B') = M_{φ v}(F B, F B')`.
pub fn restrict_bimodule<F: Scalar>(
    f: &GradedFunctor<F>,
    m: &Bimodule<F>,
) -> Result<Bimodule<F>, BimodError> {
    let a = &f.target;
    if !Arc::ptr_eq(&m.left, a) && !m.left.structurally_equal(a)
        || *m.carrier != SetBifunctor::identity(&a.base)
        || !m.right.structurally_equal(&m.left)
    {
        return Err(BimodError::ShapeMismatch);
    }
    let b = &f.source;
    let phi = &f.base;
    let carrier = Arc::new(SetBifunctor::identity(&b.base));
    let mut raw = RawBimodule {
        left: b.clone(),
        right: b.clone(),
        carrier: carrier.clone(),
        bases: HashMap::new(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    let image = |k: &BimodKey| m.space_over(phi.mor(Mor(k.0)), f.obj(k.1), f.obj(k.2));
    let keys = bimodule_keys(b, b, &carrier);
    for k in &keys {
        let mk = image(k);
        if m.dim(mk) > 0 {
            raw.bases.insert(*k, m.basis(mk).to_vec());
        }
    }
    let bsc = b.sharp_cat();
    for k in &keys {
        let mk = image(k);
        if m.dim(mk) == 0 {
            continue;
        }
        for &g in bsc.out_mors(Obj(k.2)).iter().filter(|&&g| b.dim(g) > 0) {
            let fg = f.image_mor(g);
            for i in 0..b.dim(g) {
                let act = m.left_action(fg, &f.hom(g).column(i), mk);
                for j in 0..m.dim(mk) {
                    let v = to_sparse(&act.column(j));
                    if !v.is_empty() {
                        raw.left_act.insert((g, i, *k, j), v);
                    }
                }
            }
        }
        for h in bsc.hom_into(Obj(k.1)).into_iter().filter(|&h| b.dim(h) > 0) {
            let fh = f.image_mor(h);
            for j in 0..b.dim(h) {
                let act = m.right_action(mk, fh, &f.hom(h).column(j));
                for i in 0..m.dim(mk) {
                    let v = to_sparse(&act.column(i));
                    if !v.is_empty() {
                        raw.right_act.insert((*k, i, h, j), v);
                    }
                }
            }
        }
    }
    Ok(Bimodule::assemble(raw).expect("restricted bimodule"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinCat, Functor};
    use crate::mapgraded::restrict;
    use crate::Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn identity_bimodules() {
        let u = Arc::new(FinCat::chain(2));
        let ku: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&u));
        let one = Bimodule::identity(&ku);
        assert!(one.axiom_violations().is_empty());
        assert!((0..one.num_spaces()).all(|k| one.dim(k) == 1));
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let one = Bimodule::identity(&lam);
        assert_eq!(one.dim(0), 2);
        assert!(one.axiom_violations().is_empty());
    }

    #[test]
    fn broken_action_is_reported() {
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let mut raw = Bimodule::identity(&lam).to_raw();
        // let x send 1 to 1 on the left, so x·(x·1) ≠ (x·x)·1
        let key = (0, 0, 0);
        raw.left_act.insert((Mor(0), 1, key, 0), vec![(0, q(1))]);
        let errs = Bimodule::new(raw).unwrap_err();
        assert!(matches!(errs[0], BimodError::NonAssociative { .. }));
    }

    #[test]
    fn functor_bimodules_of_identity_are_identity() {
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(3));
        let id = GradedFunctor::identity(&lam);
        let lower = Bimodule::lower(&id);
        let upper = Bimodule::upper(&id);
        assert!(lower.axiom_violations().is_empty());
        assert!(upper.axiom_violations().is_empty());
        assert_eq!(lower.total_dim(), 3);
        assert_eq!(upper.total_dim(), 3);
        let p = Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap());
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (c, o, m) = p.full_subcategory(&[Obj(0), Obj(1)]);
        let (_, delta) = restrict(&kp, &Functor::from_sub(Arc::new(c), p.clone(), o, m));
        let mf = Bimodule::lower(&delta);
        assert!(mf.axiom_violations().is_empty());
        // S_φ(V, U) = U(φV, U): s has 3 outgoing, t0 one
        assert_eq!(mf.total_dim(), 4);
        assert!(Bimodule::upper(&delta).axiom_violations().is_empty());
    }

    #[test]
    fn restriction_of_identity_bimodule() {
        let p = Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap());
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (c, o, m) = p.full_subcategory(&[Obj(0), Obj(2)]);
        let (r, delta) = restrict(&kp, &Functor::from_sub(Arc::new(c), p.clone(), o, m));
        let one = Bimodule::identity(&kp);
        let pulled = restrict_bimodule(&delta, &one).unwrap();
        assert!(pulled.structurally_equal(&Bimodule::identity(&r)));
        let same = restrict_bimodule(&GradedFunctor::identity(&kp), &one).unwrap();
        assert!(same.structurally_equal(&one));
    }
}
