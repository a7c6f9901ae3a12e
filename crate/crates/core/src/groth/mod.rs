//! Pseudofunctors `P: 𝒞 → Map` into graded categories and bimodules, their
//! Grothendieck constructions `𝔞̃` over `Ũ`, base change along functors
//! `D → 𝒞`, and the Hochschild checks built on them.
//!
//! A pseudofunctor stores one graded category `𝔞_C` per object, one
//! `𝔞_{C'}`-`𝔞_C`-bimodule `M_c` per morphism `c: C → C'` (the identity
//! bimodule on identities) and, for composable non-identity pairs, the
//! composition `M_{c_2} ⊗ M_{c_1} → M_{c_2 c_1}` on elements and bases.

mod base;
mod cstar;
mod diagram;

pub use base::{
    arrow_decomposition, base_change, chain_unrolling, slice, slice_map, ArrowDecomposition, BaseChange, Slice,
};
pub use cstar::{chain_cover_mv, cstar_base, cstar_diagram, find_product, ChainCoverReport, CStarReport};
pub use diagram::{comparison_check, ComparisonReport, FunctorialDiagram, ObjectVerdict, SquareVerdict};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::bimod::{tensor, BimodKey, Bimodule, Tensor};
use crate::fincat::{CatRef, FinCat, Mor, MorData, Obj, SetBifunctor};
use crate::hochschild::HochschildError;
use crate::mapgraded::{FiberObj, GradedCat, RawGraded, SparseVec};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GrothError {
    #[error("{0}")]
    Shape(String),
    #[error("bimodule of identity {0} is not the identity bimodule")]
    UnitNotStrict(String),
    #[error("no composition given for ({outer}, {inner})")]
    MissingCoherence { outer: String, inner: String },
    #[error("composition not associative on ({}, {}, {}): {entry}", chain[0], chain[1], chain[2])]
    CoherenceFailed { chain: [String; 3], entry: String },
    #[error("composition of ({outer}, {inner}) is not an isomorphism: {entry}")]
    NotInvertible { outer: String, inner: String, entry: String },
    #[error("total category is not a graded category: {0}")]
    Invalid(String),
    #[error("no anchor receives a morphism from {0}")]
    NoAnchorMap(String),
    #[error("anchors {0} and {1} have no product")]
    MissingProduct(String, String),
    #[error("base category is not a delta")]
    NotADelta,
    #[error("functor of {0} is not subcartesian")]
    NotSubcartesian(String),
    #[error("base category is not a poset")]
    NotAPoset,
    #[error("{0}")]
    Diagram(String),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
}

/// Composition `M_{c_2} ⊗ M_{c_1} → M_{c_2 c_1}` of one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coherence<F: Scalar> {
    /// `s_2 ∘ s_1` in `S_{c_2 c_1}` for composable elements.
    pub carrier: HashMap<(usize, usize), usize>,
    /// `(k_2, i, k_1, j)`: basis element `i` of space `k_2` of `M_{c_2}`
    /// after basis element `j` of space `k_1` of `M_{c_1}`, as a sparse
    /// vector in the matching space of `M_{c_2 c_1}`. Absent entries are zero.
    pub products: HashMap<(usize, usize, usize, usize), SparseVec<F>>,
}

impl<F: Scalar> Coherence<F> {
    pub fn empty() -> Self {
        Coherence {
            carrier: HashMap::new(),
            products: HashMap::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PseudoFunctor<F: Scalar> {
    pub base: CatRef,
    /// `𝔞_C` per object of the base.
    pub pieces: Vec<Arc<GradedCat<F>>>,
    /// `M_c` per morphism `c: C → C'`, with `left = 𝔞_{C'}`, `right = 𝔞_C`.
    pub edges: Vec<Arc<Bimodule<F>>>,
    /// Keyed by `(c_2, c_1)` for composable non-identity pairs.
    pub coherence: HashMap<(Mor, Mor), Coherence<F>>,
}

pub(crate) fn sparse<F: Scalar>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}


fn unit<F: Scalar>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Plain names where they are distinct, tagged names for the ones that clash.
pub(crate) fn dedupe(names: Vec<(String, String)>) -> Vec<String> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for (n, _) in &names {
        *count.entry(n.as_str()).or_default() += 1;
    }
    let clash: HashSet<String> = count.into_iter().filter(|e| e.1 > 1).map(|e| e.0.to_string()).collect();
    names
        .into_iter()
        .map(|(n, t)| if clash.contains(&n) { t } else { n })
        .collect()
}

fn same_cat<F: Scalar>(a: &Arc<GradedCat<F>>, b: &Arc<GradedCat<F>>) -> bool {
    Arc::ptr_eq(a, b) || a.structurally_equal(b)
}

/// Spaces of a bimodule grouped by their right object.
pub(crate) fn by_right<F: Scalar>(m: &Bimodule<F>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); m.right.num_objects()];
    for (k, key) in m.keys().iter().enumerate() {
        out[key.1].push(k);
    }
    out
}

impl<F: Scalar> PseudoFunctor<F> {
    pub fn new(
        base: CatRef,
        pieces: Vec<Arc<GradedCat<F>>>,
        edges: Vec<Arc<Bimodule<F>>>,
        coherence: HashMap<(Mor, Mor), Coherence<F>>,
    ) -> Result<Self, GrothError> {
        let p = PseudoFunctor {
            base,
            pieces,
            edges,
            coherence,
        };
        p.validate()?;
        Ok(p)
    }

    fn name(&self, c: Mor) -> String {
        self.base.mor_name(c).to_string()
    }

    /// The constant pseudofunctor at `a`.
    pub fn constant(base: &CatRef, a: &Arc<GradedCat<F>>) -> Self {
        assert!(base.num_objects() > 0);
        let one = Arc::new(Bimodule::identity(a));
        let edges = base.morphism_ids().map(|_| one.clone()).collect();
        let sc = a.sharp_cat();
        let u = &a.base;
        let mut coherence = HashMap::new();
        for (c2, c1) in composable_pairs(base) {
            let mut coh = Coherence::empty();
            for s1 in u.morphism_ids() {
                for &s2 in u.out_mors(u.tgt(s1)) {
                    coh.carrier.insert((s2.0, s1.0), u.compose(s2, s1).unwrap().0);
                }
            }
            for k1 in 0..one.num_spaces() {
                let f = spaces_mor(a, one.key(k1));
                for &g in sc.out_mors(sc.tgt(f)) {
                    let k2 = one.find(bkey(a, g)).unwrap();
                    for i in 0..a.dim(g) {
                        for j in 0..a.dim(f) {
                            let v = a.product_sparse(g, i, f, j);
                            if !v.is_empty() {
                                coh.products.insert((k2, i, k1, j), v.to_vec());
                            }
                        }
                    }
                }
            }
            coherence.insert((c2, c1), coh);
        }
        PseudoFunctor {
            base: base.clone(),
            pieces: vec![a.clone(); base.num_objects()],
            edges,
            coherence,
        }
    }

    /// `𝔟 → 𝔞` along `M` over the arrow `0 → 1`: `𝔞_0 = 𝔟 = M.right`,
    /// `𝔞_1 = 𝔞 = M.left`.
    pub fn arrow(m: &Bimodule<F>) -> Self {
        let base: CatRef = Arc::new(FinCat::chain(1));
        let mut edges = vec![None, None, None];
        let (b, a) = (m.right.clone(), m.left.clone());
        edges[base.id(Obj(0)).0] = Some(Arc::new(Bimodule::identity(&b)));
        edges[base.id(Obj(1)).0] = Some(Arc::new(Bimodule::identity(&a)));
        edges[base.hom(Obj(0), Obj(1))[0].0] = Some(Arc::new(m.clone()));
        PseudoFunctor {
            base,
            pieces: vec![b, a],
            edges: edges.into_iter().map(Option::unwrap).collect(),
            coherence: HashMap::new(),
        }
    }

    /// `𝔞_0 → 𝔞_1 → … → 𝔞_n` over the chain `0 → … → n`, with
    /// `steps[i]` an `𝔞_{i+1}`-`𝔞_i`-bimodule and
    /// `M_{i→j} = M_{j−1,j} ⊗ (… ⊗ M_{i,i+1})`.
    pub fn chain(pieces: Vec<Arc<GradedCat<F>>>, steps: Vec<Bimodule<F>>) -> Result<Self, GrothError> {
        let n = steps.len();
        if pieces.len() != n + 1 {
            return Err(GrothError::Shape(format!("{} pieces for {n} steps", pieces.len())));
        }
        for (i, s) in steps.iter().enumerate() {
            if !same_cat(&s.right, &pieces[i]) || !same_cat(&s.left, &pieces[i + 1]) {
                return Err(GrothError::Shape(format!("step {i} does not connect pieces {i} and {}", i + 1)));
            }
        }
        let base: CatRef = Arc::new(FinCat::chain(n));
        let mor = |i: usize, j: usize| base.hom(Obj(i), Obj(j))[0];
        let mut long: HashMap<(usize, usize), Arc<Bimodule<F>>> = HashMap::new();
        let mut tensors: HashMap<(usize, usize), Tensor<F>> = HashMap::new();
        for i in 0..n {
            long.insert((i, i + 1), Arc::new(steps[i].clone()));
            for j in i + 2..=n {
                let t = tensor(&steps[j - 1], &long[&(i, j - 1)])
                    .map_err(|e| GrothError::Shape(format!("tensor {i}->{j}: {e}")))?;
                long.insert((i, j), Arc::new(t.bimodule.clone()));
                tensors.insert((i, j), t);
            }
        }
        let ctx = ChainCtx {
            steps: &steps,
            long: &long,
            tensors: &tensors,
        };
        let mut coherence = HashMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..=n {
                    let (m2, m1) = (&long[&(j, k)], &long[&(i, j)]);
                    let mut coh = Coherence::empty();
                    for s1 in 0..m1.carrier.num_elems() {
                        let t = m1.carrier.elem(s1).tgt;
                        for s2 in (0..m2.carrier.num_elems()).filter(|&s2| m2.carrier.elem(s2).src == t) {
                            coh.carrier.insert((s2, s1), ctx.elem(i, j, k, s2, s1));
                        }
                    }
                    let right2 = by_right(m2);
                    for k1 in 0..m1.num_spaces() {
                        for &k2 in &right2[m1.key(k1).2] {
                            for a in 0..m2.dim(k2) {
                                for b in 0..m1.dim(k1) {
                                    let (_, v) = ctx.product(i, j, k, k2, a, k1, &unit(m1.dim(k1), b));
                                    let v = sparse(&v);
                                    if !v.is_empty() {
                                        coh.products.insert((k2, a, k1, b), v);
                                    }
                                }
                            }
                        }
                    }
                    coherence.insert((mor(j, k), mor(i, j)), coh);
                }
            }
        }
        let mut edges: Vec<Option<Arc<Bimodule<F>>>> = vec![None; base.num_morphisms()];
        for o in base.object_ids() {
            edges[base.id(o).0] = Some(Arc::new(Bimodule::identity(&pieces[o.0])));
        }
        for (&(i, j), m) in &long {
            edges[mor(i, j).0] = Some(m.clone());
        }
        PseudoFunctor::new(
            base.clone(),
            pieces,
            edges.into_iter().map(Option::unwrap).collect(),
            coherence,
        )
    }

    /// `s_2 ∘ s_1` for `s_2 ∈ S_{c_2}`, `s_1 ∈ S_{c_1}`.
    pub fn compose_elem(&self, c2: Mor, s2: usize, c1: Mor, s1: usize) -> usize {
        if self.base.is_identity(c2) {
            self.edges[c1.0].carrier.act_left(Mor(s2), s1)
        } else if self.base.is_identity(c1) {
            self.edges[c2.0].carrier.act_right(s2, Mor(s1))
        } else {
            self.coherence[&(c2, c1)].carrier[&(s2, s1)]
        }
    }

    /// Composition of space `k_2` of `M_{c_2}` after space `k_1` of
    /// `M_{c_1}`: the target space of `M_{c_2 c_1}` and the matrix whose
    /// column `i · dim k_1 + j` is `e_i ∘ e_j`. `None` when the spaces do
    /// not meet.
    pub fn compose_block(&self, c2: Mor, k2: usize, c1: Mor, k1: usize) -> Option<(usize, Matrix<F>)> {
        let (m2, m1) = (&self.edges[c2.0], &self.edges[c1.0]);
        let (s2, b2, a2) = m2.key(k2);
        let (s1, b1, a1) = m1.key(k1);
        if b2 != a1 || self.base.compose(c2, c1).is_none() {
            return None;
        }
        if self.base.is_identity(c2) {
            let g = spaces_mor(&m1.left, (s2, b2, a2));
            Some((m1.left_target(g, k1), m1.left_matrix(g, k1)))
        } else if self.base.is_identity(c1) {
            let h = spaces_mor(&m2.right, (s1, b1, a1));
            Some((m2.right_target(k2, h), m2.right_matrix(k2, h)))
        } else {
            let c = self.base.compose(c2, c1).unwrap();
            let coh = self.coherence.get(&(c2, c1))?;
            let s = *coh.carrier.get(&(s2, s1))?;
            let m = &self.edges[c.0];
            let t = m.find((s, b1, a2))?;
            let (d2, d1) = (m2.dim(k2), m1.dim(k1));
            let mut out = Matrix::zeros(m.dim(t), d2 * d1);
            for i in 0..d2 {
                for j in 0..d1 {
                    if let Some(v) = coh.products.get(&(k2, i, k1, j)) {
                        for (r, x) in v {
                            out.set(*r, i * d1 + j, x.clone());
                        }
                    }
                }
            }
            Some((t, out))
        }
    }

    /// `x ∘ y` for vectors `x` in space `k_2` of `M_{c_2}` and `y` in space
    /// `k_1` of `M_{c_1}`.
    pub fn compose_vectors(&self, c2: Mor, k2: usize, x: &[F], c1: Mor, k1: usize, y: &[F]) -> Option<(usize, Vec<F>)> {
        let (t, m) = self.compose_block(c2, k2, c1, k1)?;
        let mut xy = Vec::with_capacity(x.len() * y.len());
        for a in x {
            for b in y {
                xy.push(a.clone() * b.clone());
            }
        }
        Some((t, m.mul_vec(&xy)))
    }

    pub fn validate(&self) -> Result<(), GrothError> {
        self.check_shapes()?;
        self.check_units()?;
        self.check_coherence_data()?;
        self.check_associativity()?;
        self.check_invertible()
    }

    fn check_shapes(&self) -> Result<(), GrothError> {
        let c = &self.base;
        if self.pieces.len() != c.num_objects() || self.edges.len() != c.num_morphisms() {
            return Err(GrothError::Shape(format!(
                "{} pieces and {} bimodules over a base with {} objects and {} morphisms",
                self.pieces.len(),
                self.edges.len(),
                c.num_objects(),
                c.num_morphisms()
            )));
        }
        for m in c.morphism_ids() {
            let e = &self.edges[m.0];
            if !same_cat(&e.right, &self.pieces[c.src(m).0]) || !same_cat(&e.left, &self.pieces[c.tgt(m).0]) {
                return Err(GrothError::Shape(format!(
                    "bimodule of {} does not go between its end pieces",
                    c.mor_name(m)
                )));
            }
        }
        Ok(())
    }

    fn check_units(&self) -> Result<(), GrothError> {
        for o in self.base.object_ids() {
            let m = self.base.id(o);
            let piece = &self.pieces[o.0];
            let e = &self.edges[m.0];
            if *e.carrier != SetBifunctor::identity(&piece.base) || !e.structurally_equal(&Bimodule::identity(piece)) {
                return Err(GrothError::UnitNotStrict(self.name(m)));
            }
        }
        Ok(())
    }

    fn check_coherence_data(&self) -> Result<(), GrothError> {
        let pairs: HashSet<(Mor, Mor)> = composable_pairs(&self.base).into_iter().collect();
        for key in self.coherence.keys() {
            if !pairs.contains(key) {
                return Err(GrothError::Shape(format!(
                    "composition given for ({}, {}), which is not a composable pair of non-identities",
                    self.name(key.0),
                    self.name(key.1)
                )));
            }
        }
        for &(c2, c1) in &pairs {
            let missing = || GrothError::MissingCoherence {
                outer: self.name(c2),
                inner: self.name(c1),
            };
            let coh = self.coherence.get(&(c2, c1)).ok_or_else(missing)?;
            let c = self.base.compose(c2, c1).unwrap();
            let (m2, m1, m) = (&self.edges[c2.0], &self.edges[c1.0], &self.edges[c.0]);
            let (t2, t1, t) = (&m2.carrier, &m1.carrier, &m.carrier);
            let bad = |what: String| GrothError::Shape(format!("({}, {}): {what}", self.name(c2), self.name(c1)));
            for s1 in 0..t1.num_elems() {
                for s2 in (0..t2.num_elems()).filter(|&s2| t2.elem(s2).src == t1.elem(s1).tgt) {
                    let label = || format!("{} o {}", t2.elem(s2).name, t1.elem(s1).name);
                    let &s = coh.carrier.get(&(s2, s1)).ok_or_else(|| missing())?;
                    if s >= t.num_elems() || t.elem(s).src != t1.elem(s1).src || t.elem(s).tgt != t2.elem(s2).tgt {
                        return Err(bad(format!("{} lands outside its component", label())));
                    }
                }
            }
            for (&(k2, i, k1, j), v) in &coh.products {
                if k2 >= m2.num_spaces() || k1 >= m1.num_spaces() || i >= m2.dim(k2) || j >= m1.dim(k1) {
                    return Err(bad(format!("product key {:?} out of range", (k2, i, k1, j))));
                }
                if m2.key(k2).1 != m1.key(k1).2 {
                    return Err(bad(format!("product of non-composable spaces {} and {}", m2.space_name(k2), m1.space_name(k1))));
                }
                let (s2, _, a2) = m2.key(k2);
                let (s1, b1, _) = m1.key(k1);
                let s = coh.carrier[&(s2, s1)];
                let target = m.find((s, b1, a2)).unwrap();
                if v.iter().any(|(r, _)| *r >= m.dim(target)) {
                    return Err(bad(format!("product vector too long in {}", m.space_name(target))));
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<(), GrothError> {
        let c = &self.base;
        let right: Vec<Vec<Vec<usize>>> = self.edges.iter().map(|e| by_right(e)).collect();
        for c1 in c.morphism_ids() {
            for &c2 in c.out_mors(c.tgt(c1)) {
                for &c3 in c.out_mors(c.tgt(c2)) {
                    let ids = [c1, c2, c3].iter().filter(|&&m| c.is_identity(m)).count();
                    if ids > 1 {
                        continue;
                    }
                    let c21 = c.compose(c2, c1).unwrap();
                    let c32 = c.compose(c3, c2).unwrap();
                    let chain = || [self.name(c3), self.name(c2), self.name(c1)];
                    let (t1, t2, t3) = (
                        &self.edges[c1.0].carrier,
                        &self.edges[c2.0].carrier,
                        &self.edges[c3.0].carrier,
                    );
                    for s1 in 0..t1.num_elems() {
                        for s2 in (0..t2.num_elems()).filter(|&s| t2.elem(s).src == t1.elem(s1).tgt) {
                            for s3 in (0..t3.num_elems()).filter(|&s| t3.elem(s).src == t2.elem(s2).tgt) {
                                let lhs = self.compose_elem(c32, self.compose_elem(c3, s3, c2, s2), c1, s1);
                                let rhs = self.compose_elem(c3, s3, c21, self.compose_elem(c2, s2, c1, s1));
                                if lhs != rhs {
                                    return Err(GrothError::CoherenceFailed {
                                        chain: chain(),
                                        entry: format!(
                                            "elements {}, {}, {}",
                                            t3.elem(s3).name,
                                            t2.elem(s2).name,
                                            t1.elem(s1).name
                                        ),
                                    });
                                }
                            }
                        }
                    }
                    let (m1, m2, m3) = (&self.edges[c1.0], &self.edges[c2.0], &self.edges[c3.0]);
                    for k1 in (0..m1.num_spaces()).filter(|&k| m1.dim(k) > 0) {
                        for &k2 in right[c2.0][m1.key(k1).2].iter().filter(|&&k| m2.dim(k) > 0) {
                            for &k3 in right[c3.0][m2.key(k2).2].iter().filter(|&&k| m3.dim(k) > 0) {
                                let (d1, d2, d3) = (m1.dim(k1), m2.dim(k2), m3.dim(k3));
                                let (t21, p21) = self.compose_block(c2, k2, c1, k1).unwrap();
                                let (t32, p32) = self.compose_block(c3, k3, c2, k2).unwrap();
                                let (tl, l) = self.compose_block(c32, t32, c1, k1).unwrap();
                                let (tr, r) = self.compose_block(c3, k3, c21, t21).unwrap();
                                let lhs = l.mul(&Matrix::kron(&p32, &Matrix::identity(d1)));
                                let rhs = r.mul(&Matrix::kron(&Matrix::identity(d3), &p21));
                                if tl != tr || lhs != rhs {
                                    let col = lhs.sub(&rhs).first_nonzero().map_or(0, |e| e.1);
                                    let (i3, i2, i1) = (col / (d2 * d1), (col / d1) % d2, col % d1);
                                    return Err(GrothError::CoherenceFailed {
                                        chain: chain(),
                                        entry: format!(
                                            "{}[{}] . {}[{}] . {}[{}]",
                                            m3.space_name(k3),
                                            m3.basis(k3)[i3],
                                            m2.space_name(k2),
                                            m2.basis(k2)[i2],
                                            m1.space_name(k1),
                                            m1.basis(k1)[i1]
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_invertible(&self) -> Result<(), GrothError> {
        for (c2, c1) in composable_pairs(&self.base) {
            let c = self.base.compose(c2, c1).unwrap();
            let (m2, m1, m) = (&self.edges[c2.0], &self.edges[c1.0], &self.edges[c.0]);
            let fail = |entry: String| GrothError::NotInvertible {
                outer: self.name(c2),
                inner: self.name(c1),
                entry,
            };
            let t = tensor(m2, m1).map_err(|e| fail(e.to_string()))?;
            let comp = &t.composite;
            let mut image = vec![None; comp.bifunctor.num_elems()];
            for (cls, members) in comp.members.iter().enumerate() {
                let vals: HashSet<usize> = members.iter().map(|&(a, b)| self.compose_elem(c2, a, c1, b)).collect();
                if vals.len() != 1 {
                    return Err(fail(format!("class {} is not balanced", comp.bifunctor.elem(cls).name)));
                }
                image[cls] = vals.into_iter().next();
            }
            let hit: HashSet<usize> = image.iter().flatten().copied().collect();
            if hit.len() != image.len() || hit.len() != m.carrier.num_elems() {
                return Err(fail("carrier composition is not a bijection".into()));
            }
            let mut cache: HashMap<(usize, usize), (usize, Matrix<F>)> = HashMap::new();
            for k in 0..t.bimodule.num_spaces() {
                let (cls, b, a) = t.bimodule.key(k);
                let target = m.find((image[cls].unwrap(), b, a)).unwrap();
                let dk = t.bimodule.dim(k);
                if dk != m.dim(target) {
                    return Err(fail(format!(
                        "{} has dimension {dk}, {} has {}",
                        t.bimodule.space_name(k),
                        m.space_name(target),
                        m.dim(target)
                    )));
                }
                if dk == 0 {
                    continue;
                }
                let mut cols = Vec::with_capacity(dk);
                for q in 0..dk {
                    let (k2, i, k1, j) = t.lift(k, q);
                    let (_, block) = cache
                        .entry((k2, k1))
                        .or_insert_with(|| self.compose_block(c2, k2, c1, k1).expect("composable spaces"));
                    cols.push(block.column(i * m1.dim(k1) + j));
                }
                if !Matrix::from_columns(dk, &cols).is_invertible() {
                    return Err(fail(format!("on {}", m.space_name(target))));
                }
            }
        }
        Ok(())
    }
}

/// Composable pairs `(c_2, c_1)` of non-identity morphisms.
pub(crate) fn composable_pairs(c: &FinCat) -> Vec<(Mor, Mor)> {
    let mut out = Vec::new();
    for c1 in c.morphism_ids().filter(|&m| !c.is_identity(m)) {
        for &c2 in c.out_mors(c.tgt(c1)).iter().filter(|&&m| !c.is_identity(m)) {
            out.push((c2, c1));
        }
    }
    out
}

fn bkey<F: Scalar>(a: &GradedCat<F>, m: Mor) -> BimodKey {
    let (u, x, y) = a.key(m);
    (u.0, x, y)
}

/// Sharp morphism of `a` behind a space `(u, X, Y)` of an identity bimodule.
fn spaces_mor<F: Scalar>(a: &GradedCat<F>, key: BimodKey) -> Mor {
    a.sharp_mor(Mor(key.0), key.1, key.2).expect("sharp morphism of a space")
}

struct ChainCtx<'a, F: Scalar> {
    steps: &'a [Bimodule<F>],
    long: &'a HashMap<(usize, usize), Arc<Bimodule<F>>>,
    tensors: &'a HashMap<(usize, usize), Tensor<F>>,
}

impl<F: Scalar> ChainCtx<'_, F> {
    /// `s_2 ∘ s_1` for `s_2 ∈ S_{j→k}`, `s_1 ∈ S_{i→j}`.
    fn elem(&self, i: usize, j: usize, k: usize, s2: usize, s1: usize) -> usize {
        let t = &self.tensors[&(i, k)];
        if k == j + 1 {
            return t.composite.class_of[&(s2, s1)];
        }
        let (a, b) = self.tensors[&(j, k)].composite.members[s2][0];
        let r = self.elem(i, j, k - 1, b, s1);
        t.composite.class_of[&(a, r)]
    }

    /// Basis element `a` of space `k2` of `M_{j→k}` after `y` in space `k1`
    /// of `M_{i→j}`.
    fn product(&self, i: usize, j: usize, k: usize, k2: usize, a: usize, k1: usize, y: &[F]) -> (usize, Vec<F>) {
        let t = &self.tensors[&(i, k)];
        let m1 = &self.long[&(i, j)];
        if k == j + 1 {
            let step = &self.steps[j];
            return t.class(k2, &unit(step.dim(k2), a), k1, y, step, m1);
        }
        let (mk, p, nk, q) = self.tensors[&(j, k)].lift(k2, a);
        let (r, v) = self.product(i, j, k - 1, nk, q, k1, y);
        let step = &self.steps[k - 1];
        t.class(mk, &unit(step.dim(mk), p), r, &v, step, &self.long[&(i, k - 1)])
    }
}

/// `𝔞̃ = ∫P` over `Ũ`. Objects of `Ũ` are pairs `(C, U)`, listed by `C`;
/// morphisms are pairs `(c, s)` with `s ∈ S_c`, listed by `c`. Names stay
/// plain unless they clash, in which case they are tagged `C:name`.
#[derive(Clone, Debug)]
pub struct Grothendieck<F: Scalar> {
    pub cat: Arc<GradedCat<F>>,
    base_objs: Vec<Vec<Obj>>,
    base_mors: Vec<Vec<Mor>>,
    objects: Vec<Vec<usize>>,
    /// `(C, U)` behind each object of `Ũ`.
    pub base_obj_origin: Vec<(Obj, Obj)>,
    /// `(c, s)` behind each morphism of `Ũ`.
    pub base_mor_origin: Vec<(Mor, usize)>,
    /// `(C, A)` behind each object of `𝔞̃`.
    pub object_origin: Vec<(Obj, usize)>,
}

impl<F: Scalar> Grothendieck<F> {
    pub fn base_obj(&self, c: Obj, u: Obj) -> Obj {
        self.base_objs[c.0][u.0]
    }

    pub fn base_mor(&self, c: Mor, s: usize) -> Mor {
        self.base_mors[c.0][s]
    }

    pub fn object(&self, c: Obj, a: usize) -> usize {
        self.objects[c.0][a]
    }
}

pub fn grothendieck<F: Scalar>(p: &PseudoFunctor<F>) -> Result<Grothendieck<F>, GrothError> {
    let c = &p.base;
    let mut base_objs = Vec::new();
    let mut base_obj_origin = Vec::new();
    let mut obj_names = Vec::new();
    for o in c.object_ids() {
        let u = &p.pieces[o.0].base;
        base_objs.push(
            u.object_ids()
                .map(|x| {
                    base_obj_origin.push((o, x));
                    let n = u.obj_name(x).to_string();
                    obj_names.push((n.clone(), format!("{}:{n}", c.obj_name(o))));
                    Obj(base_obj_origin.len() - 1)
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut base_mors = Vec::new();
    let mut base_mor_origin = Vec::new();
    let mut mor_names = Vec::new();
    let mut mor_data = Vec::new();
    for m in c.morphism_ids() {
        let s = &p.edges[m.0].carrier;
        let (src, tgt) = (c.src(m), c.tgt(m));
        let mut row = Vec::new();
        for (i, e) in s.elems().iter().enumerate() {
            row.push(Mor(base_mor_origin.len()));
            base_mor_origin.push((m, i));
            let tag = if c.is_identity(m) { c.obj_name(src) } else { c.mor_name(m) };
            mor_names.push((e.name.clone(), format!("{tag}:{}", e.name)));
            mor_data.push((base_objs[src.0][e.src.0], base_objs[tgt.0][e.tgt.0]));
        }
        base_mors.push(row);
    }
    let morphisms: Vec<MorData> = dedupe(mor_names)
        .into_iter()
        .zip(&mor_data)
        .map(|(name, &(src, tgt))| MorData { name, src, tgt })
        .collect();
    let identity: Vec<Mor> = base_obj_origin
        .iter()
        .map(|&(o, x)| base_mors[c.id(o).0][p.pieces[o.0].base.id(x).0])
        .collect();
    let n = morphisms.len();
    let mut comp = vec![None; n * n];
    for (g, &(c2, s2)) in base_mor_origin.iter().enumerate() {
        for (f, &(c1, s1)) in base_mor_origin.iter().enumerate() {
            if morphisms[f].tgt != morphisms[g].src {
                continue;
            }
            let c21 = c.compose(c2, c1).expect("composable base morphisms");
            comp[g * n + f] = Some(base_mors[c21.0][p.compose_elem(c2, s2, c1, s1)]);
        }
    }
    let total = FinCat::assemble(dedupe(obj_names), morphisms, identity, comp);
    if let Some(e) = total.axiom_violations().first() {
        return Err(GrothError::Invalid(e.to_string()));
    }
    let total: CatRef = Arc::new(total);

    let mut objects = Vec::new();
    let mut object_origin = Vec::new();
    let mut fiber_objs = Vec::new();
    let mut names = Vec::new();
    for o in c.object_ids() {
        let piece = &p.pieces[o.0];
        let mut row = Vec::new();
        for x in 0..piece.num_objects() {
            row.push(object_origin.len());
            object_origin.push((o, x));
            let n = piece.obj_name(x).to_string();
            names.push((n.clone(), format!("{}:{n}", c.obj_name(o))));
            fiber_objs.push(base_objs[o.0][piece.over(x).0]);
        }
        objects.push(row);
    }
    let fiber_objs = dedupe(names)
        .into_iter()
        .zip(fiber_objs)
        .map(|(name, over)| FiberObj { name, over })
        .collect();

    let key_of = |m: Mor, k: usize| {
        let e = &p.edges[m.0];
        let (s, b, a) = e.key(k);
        (base_mors[m.0][s], objects[c.src(m).0][b], objects[c.tgt(m).0][a])
    };
    let mut bases = HashMap::new();
    for m in c.morphism_ids() {
        let e = &p.edges[m.0];
        for k in (0..e.num_spaces()).filter(|&k| e.dim(k) > 0) {
            bases.insert(key_of(m, k), e.basis(k).to_vec());
        }
    }
    let mut products = HashMap::new();
    for c1 in c.morphism_ids() {
        let m1 = &p.edges[c1.0];
        for &c2 in c.out_mors(c.tgt(c1)) {
            let m2 = &p.edges[c2.0];
            let right2 = by_right(m2);
            for k1 in (0..m1.num_spaces()).filter(|&k| m1.dim(k) > 0) {
                for &k2 in right2[m1.key(k1).2].iter().filter(|&&k| m2.dim(k) > 0) {
                    let (_, block) = p.compose_block(c2, k2, c1, k1).expect("composable spaces");
                    let d1 = m1.dim(k1);
                    for i in 0..m2.dim(k2) {
                        for j in 0..d1 {
                            let v = sparse(&block.column(i * d1 + j));
                            if !v.is_empty() {
                                products.insert((key_of(c2, k2), i, key_of(c1, k1), j), v);
                            }
                        }
                    }
                }
            }
        }
    }
    let identities = object_origin
        .iter()
        .map(|&(o, x)| Some(p.pieces[o.0].identity_sparse(x).to_vec()))
        .collect();
    let cat = GradedCat::new(RawGraded {
        base: total,
        objects: fiber_objs,
        bases,
        products,
        identities,
    })
    .map_err(|e| GrothError::Invalid(e.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))?;
    Ok(Grothendieck {
        cat: Arc::new(cat),
        base_objs,
        base_mors,
        objects,
        base_obj_origin,
        base_mor_origin,
        object_origin,
    })
}

#[cfg(test)]
mod tests;
