use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use super::{restrict, FiberObj, GradedCat, GradedError, GradedFunctor, GradedFunctorError, RawGraded, SharpKey};
use crate::fincat::{is_n_cover, pullback_cat, CatPullback, CatRef, CoverDegree, Functor, Mor, Obj};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DescentError {
    #[error("malformed descent datum: {0}")]
    Malformed(String),
    #[error("transition {i}->{j} is not an isomorphism over the overlap")]
    NotIsomorphism { i: usize, j: usize },
    #[error("the legs do not form a {degree}-cover; unhit simplex {witness}")]
    InsufficientCover { degree: usize, witness: String },
    #[error("cocycle condition fails on ({i},{j},{k}) at {at}")]
    CocycleViolated { i: usize, j: usize, k: usize, at: String },
    #[error("{0} has no lift to any piece")]
    NotCovered(String),
    #[error("composition {g} o {f} differs between lifts {first} and {second}")]
    CompositionIllDefined { g: String, f: String, first: String, second: String },
    #[error("glued composition is not associative on ({h}, {g}, {f})")]
    AssociativityFailed { h: String, g: String, f: String },
}

/// Overlap `V_ij = V_i ×_U V_j` with the two canonical restrictions
/// `𝔟_i|_ij` (left) and `𝔟_j|_ij` (right).
#[derive(Clone, Debug)]
pub struct Overlap<F: Scalar> {
    pub pullback: CatPullback,
    pub left: Arc<GradedCat<F>>,
    pub right: Arc<GradedCat<F>>,
    left_delta: GradedFunctor<F>,
    right_delta: GradedFunctor<F>,
    left_index: HashMap<(Obj, usize), usize>,
    right_index: HashMap<(Obj, usize), usize>,
}

fn local_index<F: Scalar>(delta: &GradedFunctor<F>) -> HashMap<(Obj, usize), usize> {
    (0..delta.source.num_objects())
        .map(|x| ((delta.source.over(x), delta.obj(x)), x))
        .collect()
}

impl<F: Scalar> Overlap<F> {
    fn new(
        legs: (&Functor, &Functor),
        pieces: (&Arc<GradedCat<F>>, &Arc<GradedCat<F>>),
    ) -> Overlap<F> {
        let pullback = pullback_cat(legs.0, legs.1).expect("legs share the target");
        let (left, left_delta) = restrict(pieces.0, &pullback.p1);
        let (right, right_delta) = restrict(pieces.1, &pullback.p2);
        Overlap {
            left_index: local_index(&left_delta),
            right_index: local_index(&right_delta),
            pullback,
            left,
            right,
            left_delta,
            right_delta,
        }
    }

    /// Object of `left` lying over `w` and coming from `b` in `𝔟_i`.
    pub fn left_object(&self, w: Obj, b: usize) -> Option<usize> {
        self.left_index.get(&(w, b)).copied()
    }

    pub fn right_object(&self, w: Obj, b: usize) -> Option<usize> {
        self.right_index.get(&(w, b)).copied()
    }

    /// Object of `𝔟_i` underlying an object of `left`.
    pub fn left_origin(&self, x: usize) -> usize {
        self.left_delta.obj(x)
    }

    pub fn right_origin(&self, x: usize) -> usize {
        self.right_delta.obj(x)
    }

    /// The identity transition, when both restrictions coincide.
    pub fn identity_transition(&self) -> Option<Transition<F>> {
        let (l, r) = (&self.left, &self.right);
        if l.num_objects() != r.num_objects()
            || (0..l.num_objects()).any(|x| l.over(x) != r.over(x))
            || l.sharp_cat().morphism_ids().any(|m| l.dim(m) != r.dim(m))
        {
            return None;
        }
        Some(Transition {
            obj_map: (0..l.num_objects()).collect(),
            hom: l
                .sharp_cat()
                .morphism_ids()
                .map(|m| Matrix::identity(l.dim(m)))
                .collect(),
        })
    }
}

/// Object map and hom matrices of `ρ_ij: 𝔟_i|_ij → 𝔟_j|_ij` over the
/// identity of `V_ij`, indexed as in [`Overlap::left`].
#[derive(Clone, Debug)]
pub struct Transition<F: Scalar> {
    pub obj_map: Vec<usize>,
    pub hom: Vec<Matrix<F>>,
}

/// Cover legs `φ_i: V_i → U`, pieces `𝔟_i` over `V_i` and transitions
/// `ρ_ij` for every ordered pair, including `i = j`.
#[derive(Clone, Debug)]
pub struct DescentDatum<F: Scalar> {
    pub base: CatRef,
    pub legs: Vec<Functor>,
    pub pieces: Vec<Arc<GradedCat<F>>>,
    overlaps: BTreeMap<(usize, usize), Overlap<F>>,
    transitions: BTreeMap<(usize, usize), GradedFunctor<F>>,
}

impl<F: Scalar> DescentDatum<F> {
    /// `transition(i, j, overlap)` supplies `ρ_ij`; each is checked to be an
    /// isomorphism of graded categories over the identity of `V_ij`.
    pub fn new(
        legs: Vec<Functor>,
        pieces: Vec<Arc<GradedCat<F>>>,
        mut transition: impl FnMut(usize, usize, &Overlap<F>) -> Result<Transition<F>, DescentError>,
    ) -> Result<DescentDatum<F>, DescentError> {
        if legs.is_empty() || legs.len() != pieces.len() {
            return Err(DescentError::Malformed(format!(
                "{} legs and {} pieces",
                legs.len(),
                pieces.len()
            )));
        }
        let base = legs[0].target.clone();
        for (i, (leg, piece)) in legs.iter().zip(&pieces).enumerate() {
            if *leg.target != *base {
                return Err(DescentError::Malformed(format!("leg {i} has another target")));
            }
            if *piece.base != *leg.source {
                return Err(DescentError::Malformed(format!(
                    "piece {i} is not graded over the source of its leg"
                )));
            }
        }
        let mut overlaps = BTreeMap::new();
        let mut transitions = BTreeMap::new();
        for i in 0..legs.len() {
            for j in 0..legs.len() {
                let ov = Overlap::new((&legs[i], &legs[j]), (&pieces[i], &pieces[j]));
                let t = transition(i, j, &ov)?;
                let rho = GradedFunctor::new(
                    ov.left.clone(),
                    ov.right.clone(),
                    Functor::identity(&ov.pullback.cat),
                    t.obj_map,
                    t.hom,
                )
                .map_err(|e| DescentError::Malformed(format!("transition {i}->{j}: {e}")))?;
                if !rho.is_isomorphism() {
                    return Err(DescentError::NotIsomorphism { i, j });
                }
                transitions.insert((i, j), rho);
                overlaps.insert((i, j), ov);
            }
        }
        Ok(DescentDatum {
            base,
            legs,
            pieces,
            overlaps,
            transitions,
        })
    }

    /// Pieces with identity transitions; fails unless all restrictions to
    /// overlaps agree.
    pub fn trivial(
        legs: Vec<Functor>,
        pieces: Vec<Arc<GradedCat<F>>>,
    ) -> Result<DescentDatum<F>, DescentError> {
        DescentDatum::new(legs, pieces, |i, j, ov| {
            ov.identity_transition().ok_or_else(|| {
                DescentError::Malformed(format!("pieces {i} and {j} differ on their overlap"))
            })
        })
    }

    /// Restrictions of `a` along the legs with identity transitions, and the
    /// restriction functors `𝔟_i → 𝔞`.
    pub fn from_global(
        a: &Arc<GradedCat<F>>,
        legs: Vec<Functor>,
    ) -> Result<(DescentDatum<F>, Vec<GradedFunctor<F>>), DescentError> {
        let (pieces, deltas): (Vec<_>, Vec<_>) = legs.iter().map(|l| restrict(a, l)).unzip();
        Ok((DescentDatum::trivial(legs, pieces)?, deltas))
    }

    pub fn num_pieces(&self) -> usize {
        self.legs.len()
    }

    pub fn overlap(&self, i: usize, j: usize) -> &Overlap<F> {
        &self.overlaps[&(i, j)]
    }

    pub fn transition(&self, i: usize, j: usize) -> &GradedFunctor<F> {
        &self.transitions[&(i, j)]
    }

    /// `ρ_ij` on objects: the object of `𝔟_j` matched with `b` of `𝔟_i` over
    /// the overlap object `w`.
    fn tau(&self, i: usize, j: usize, w: Obj, b: usize) -> usize {
        let ov = &self.overlaps[&(i, j)];
        ov.right_origin(self.transitions[&(i, j)].obj(ov.left_index[&(w, b)]))
    }

    /// `ρ_ij` on the hom over `m ∈ V_ij` between objects `b1, b2` of `𝔟_i`.
    fn rho_hom(&self, i: usize, j: usize, m: Mor, b1: usize, b2: usize) -> &Matrix<F> {
        let ov = &self.overlaps[&(i, j)];
        let w = &ov.pullback.cat;
        let s = ov
            .left
            .sharp_mor(m, ov.left_index[&(w.src(m), b1)], ov.left_index[&(w.tgt(m), b2)])
            .expect("hom of the overlap");
        self.transitions[&(i, j)].hom(s)
    }

    /// Checks `ρ_jk| ∘ ρ_ij| = ρ_ik|` on every triple overlap, on objects and
    /// on every hom.
    pub fn check_cocycle(&self) -> Result<(), DescentError> {
        let n = self.num_pieces();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    self.check_triple(i, j, k)?;
                }
            }
        }
        Ok(())
    }

    fn check_triple(&self, i: usize, j: usize, k: usize) -> Result<(), DescentError> {
        let pij = &self.overlaps[&(i, j)].pullback;
        let pjk = &self.overlaps[&(j, k)].pullback;
        let pik = &self.overlaps[&(i, k)].pullback;
        let t = pullback_cat(&self.legs[i].after(&pij.p1), &self.legs[k]).expect("shared target");
        let bi = &self.pieces[i];
        let fail = |at: String| DescentError::CocycleViolated { i, j, k, at };
        for o in t.cat.object_ids() {
            let wij = t.p1.obj(o);
            let (vi, vj, vk) = (pij.p1.obj(wij), pij.p2.obj(wij), t.p2.obj(o));
            let wjk = pjk.obj_of(vj, vk).unwrap();
            let wik = pik.obj_of(vi, vk).unwrap();
            for &b in bi.fiber(vi) {
                let c = self.tau(i, j, wij, b);
                if self.tau(j, k, wjk, c) != self.tau(i, k, wik, b) {
                    return Err(fail(format!("object {} over {}", bi.obj_name(b), t.cat.obj_name(o))));
                }
            }
        }
        for m in t.cat.morphism_ids() {
            let mij = t.p1.mor(m);
            let (mi, mj, mk) = (pij.p1.mor(mij), pij.p2.mor(mij), t.p2.mor(m));
            let mjk = pjk.mor_of(mj, mk).unwrap();
            let mik = pik.mor_of(mi, mk).unwrap();
            let (vi, vi2) = (bi.base.src(mi), bi.base.tgt(mi));
            for &b1 in bi.fiber(vi) {
                for &b2 in bi.fiber(vi2) {
                    let c1 = self.tau(i, j, pij.cat.src(mij), b1);
                    let c2 = self.tau(i, j, pij.cat.tgt(mij), b2);
                    let left = self
                        .rho_hom(j, k, mjk, c1, c2)
                        .mul(self.rho_hom(i, j, mij, b1, b2));
                    if &left != self.rho_hom(i, k, mik, b1, b2) {
                        let s = bi.sharp_mor(mi, b1, b2).unwrap();
                        return Err(fail(format!("{} over {}", bi.hom_name(s), t.cat.mor_name(m))));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Glueing options.
#[derive(Clone, Copy, Debug)]
pub struct GlueOptions {
    /// Skip the 3-cover check. Glueing then may fail or produce a category
    /// whose restrictions do not recover the pieces.
    pub assume_cover: bool,
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions {
            assume_cover: false,
        }
    }
}

/// Result of glueing: the category over `U` and the isomorphisms
/// `F_i: 𝔟_i → glued^{φ_i}`.
#[derive(Clone, Debug)]
pub struct Glued<F: Scalar> {
    pub cat: Arc<GradedCat<F>>,
    pub isos: Vec<GradedFunctor<F>>,
    /// Glued object of each object of each piece.
    pub class_of: Vec<Vec<usize>>,
    /// Representative `(piece, object)` of each glued object.
    pub representatives: Vec<(usize, usize)>,
    /// Representative `(piece, sharp morphism)` of each glued hom.
    pub hom_representatives: Vec<(usize, Mor)>,
}

impl<F: Scalar> Glued<F> {
    /// The functor `glued → 𝔞` over the identity of `U` induced by
    /// functors `G_i: 𝔟_i → 𝔞` over the legs, read off on representatives.
    pub fn comparison(
        &self,
        a: &Arc<GradedCat<F>>,
        functors: &[GradedFunctor<F>],
    ) -> Result<GradedFunctor<F>, GradedFunctorError> {
        let obj_map = self
            .representatives
            .iter()
            .map(|&(i, b)| functors[i].obj(b))
            .collect();
        let hom = self
            .hom_representatives
            .iter()
            .map(|&(i, s)| functors[i].hom(s).clone())
            .collect();
        GradedFunctor::new(
            self.cat.clone(),
            a.clone(),
            Functor::identity(&self.cat.base),
            obj_map,
            hom,
        )
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Keeps the smaller root so that roots are least members.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Glues a descent datum to a graded category over the common base.
///
/// Objects are classes of `(i, B)` under the transitions, represented by the
/// least pair. The hom over `(u, X, Y)` is the hom of the least lift
/// `(i, s)`; every other lift is identified with it through the transition
/// on the overlap. Composition is read off the first lift of each composable
/// pair, and every other lift must agree with it.
pub fn glue_descent<F: Scalar>(
    d: &DescentDatum<F>,
    opts: GlueOptions,
) -> Result<Glued<F>, DescentError> {
    if !opts.assume_cover {
        let verdict = is_n_cover(&d.base, &d.legs, CoverDegree::Finite(3));
        if !verdict.covered {
            return Err(DescentError::InsufficientCover {
                degree: 3,
                witness: verdict
                    .witness
                    .map_or_else(String::new, |s| s.display(&d.base)),
            });
        }
    }
    d.check_cocycle()?;
    let n = d.num_pieces();
    let u = &d.base;

    // objects
    let offsets: Vec<usize> = d
        .pieces
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.num_objects();
            Some(o)
        })
        .collect();
    let total = offsets.last().unwrap() + d.pieces[n - 1].num_objects();
    let mut uf = UnionFind((0..total).collect());
    for i in 0..n {
        for j in 0..n {
            let ov = &d.overlaps[&(i, j)];
            let rho = &d.transitions[&(i, j)];
            for x in 0..ov.left.num_objects() {
                let y = rho.obj(x);
                uf.union(offsets[i] + ov.left_origin(x), offsets[j] + ov.right_origin(y));
            }
        }
    }
    let mut class_index: HashMap<usize, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (i, piece) in d.pieces.iter().enumerate() {
        let mut row = Vec::with_capacity(piece.num_objects());
        for b in 0..piece.num_objects() {
            let root = uf.find(offsets[i] + b);
            let next = class_index.len();
            let c = *class_index.entry(root).or_insert(next);
            if c == representatives.len() {
                representatives.push((i, b));
            }
            row.push(c);
        }
        class_of.push(row);
    }
    let mut objects: Vec<FiberObj> = representatives
        .iter()
        .map(|&(i, b)| FiberObj {
            name: d.pieces[i].obj_name(b).to_string(),
            over: d.legs[i].obj(d.pieces[i].over(b)),
        })
        .collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for o in &objects {
        *counts.entry(o.name.clone()).or_default() += 1;
    }
    for (o, &(i, _)) in objects.iter_mut().zip(&representatives) {
        if counts[&o.name] > 1 {
            o.name = format!("{}.{}", o.name, i);
        }
    }

    // homs: lifts grouped by glued key, in (piece, sharp morphism) order
    let mut lifts: BTreeMap<SharpKey, Vec<(usize, Mor)>> = BTreeMap::new();
    for (i, piece) in d.pieces.iter().enumerate() {
        for s in piece.sharp_cat().morphism_ids() {
            let (m, b1, b2) = piece.key(s);
            let key = (d.legs[i].mor(m), class_of[i][b1], class_of[i][b2]);
            lifts.entry(key).or_default().push((i, s));
        }
    }
    // transfer into the representative's coordinates and back
    let mut transfer: HashMap<(usize, Mor), (Matrix<F>, Matrix<F>)> = HashMap::new();
    let mut bases = HashMap::new();
    let mut rep_of_key: HashMap<SharpKey, (usize, Mor)> = HashMap::new();
    for (key, ls) in &lifts {
        let (i, s) = ls[0];
        let pi = &d.pieces[i];
        let (m, b1, b2) = pi.key(s);
        rep_of_key.insert(*key, (i, s));
        if pi.dim(s) > 0 {
            bases.insert(*key, pi.basis(s).to_vec());
        }
        for &(j, s2) in ls {
            let pj = &d.pieces[j];
            let (m2, c1, c2) = pj.key(s2);
            let pb = &d.overlaps[&(i, j)].pullback;
            let w = pb.mor_of(m, m2).expect("lifts of one morphism meet in the overlap");
            if d.tau(i, j, pb.cat.src(w), b1) != c1 || d.tau(i, j, pb.cat.tgt(w), b2) != c2 {
                return Err(DescentError::Malformed(format!(
                    "{} and {} are not matched by the transition",
                    pi.hom_name(s),
                    pj.hom_name(s2)
                )));
            }
            let r = d.rho_hom(i, j, w, b1, b2).clone();
            let t = r.inverse().expect("transitions are isomorphisms");
            transfer.insert((j, s2), (t, r));
        }
    }
    let hom_label = |key: &SharpKey| {
        format!("{}({},{})", u.mor_name(key.0), objects[key.1].name, objects[key.2].name)
    };
    let lift_label = |i: usize, g: Mor, f: Mor| {
        format!("{}:{}o{}", i, d.pieces[i].hom_name(g), d.pieces[i].hom_name(f))
    };

    // composition from 2-simplex lifts
    let mut products: HashMap<(SharpKey, usize, SharpKey, usize), Vec<(usize, F)>> = HashMap::new();
    let mut chosen: HashMap<(SharpKey, SharpKey), (Matrix<F>, String)> = HashMap::new();
    for (i, piece) in d.pieces.iter().enumerate() {
        let sc = piece.sharp_cat();
        let glued_key = |s: Mor| {
            let (m, b1, b2) = piece.key(s);
            (d.legs[i].mor(m), class_of[i][b1], class_of[i][b2])
        };
        for f in sc.morphism_ids().filter(|&f| piece.dim(f) > 0) {
            for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| piece.dim(g) > 0) {
                let gf = sc.compose(g, f).unwrap();
                let c = transfer[&(i, gf)]
                    .0
                    .mul(&piece.comp_matrix(g, f))
                    .mul(&Matrix::kron(&transfer[&(i, g)].1, &transfer[&(i, f)].1));
                let key = (glued_key(g), glued_key(f));
                match chosen.get(&key) {
                    Some((c0, first)) => {
                        if *c0 != c {
                            return Err(DescentError::CompositionIllDefined {
                                g: hom_label(&key.0),
                                f: hom_label(&key.1),
                                first: first.clone(),
                                second: lift_label(i, g, f),
                            });
                        }
                    }
                    None => {
                        chosen.insert(key, (c, lift_label(i, g, f)));
                    }
                }
            }
        }
    }
    for ((gk, fk), (c, _)) in &chosen {
        let df = c.ncols() / rep_dim(d, &rep_of_key, gk).max(1);
        for col in 0..c.ncols() {
            let v: Vec<(usize, F)> = c
                .column(col)
                .into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect();
            if !v.is_empty() {
                products.insert((*gk, col / df, *fk, col % df), v);
            }
        }
    }

    let identities = representatives
        .iter()
        .map(|&(i, b)| {
            let p = &d.pieces[i];
            let s = p.identity_mor(b);
            let v = transfer[&(i, s)].0.mul_vec(&p.identity_vec(b));
            Some(
                v.into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            )
        })
        .collect();
    let raw = RawGraded {
        base: u.clone(),
        objects,
        bases,
        products,
        identities,
    };
    let shape = GradedCat::assemble(raw.clone()).map_err(|e| DescentError::Malformed(format!("{e:?}")))?;
    let sc = shape.sharp_cat();
    let mut hom_representatives = Vec::with_capacity(sc.num_morphisms());
    for m in sc.morphism_ids() {
        let key = shape.key(m);
        match rep_of_key.get(&key) {
            Some(&r) => hom_representatives.push(r),
            None => return Err(DescentError::NotCovered(shape.hom_name(m))),
        }
    }
    for f in sc.morphism_ids().filter(|&f| shape.dim(f) > 0) {
        for &g in sc.out_mors(sc.tgt(f)).iter().filter(|&&g| shape.dim(g) > 0) {
            if !chosen.contains_key(&(shape.key(g), shape.key(f))) {
                return Err(DescentError::NotCovered(format!(
                    "composable pair {} o {}",
                    shape.hom_name(g),
                    shape.hom_name(f)
                )));
            }
        }
    }
    let cat = Arc::new(GradedCat::new(raw).map_err(|errs| match errs.into_iter().next() {
        Some(GradedError::NonAssociative { h, g, f }) => DescentError::AssociativityFailed { h, g, f },
        Some(e) => DescentError::Malformed(e.to_string()),
        None => DescentError::Malformed("unknown".into()),
    })?);

    // F_i: 𝔟_i → glued^{φ_i}
    let mut isos = Vec::with_capacity(n);
    for (i, piece) in d.pieces.iter().enumerate() {
        let (r, delta) = restrict(&cat, &d.legs[i]);
        let index = local_index(&delta);
        let obj_map = (0..piece.num_objects())
            .map(|b| index[&(piece.over(b), class_of[i][b])])
            .collect();
        let mut hom = vec![Matrix::zeros(0, 0); piece.sharp_cat().num_morphisms()];
        for s in piece.sharp_cat().morphism_ids() {
            hom[s.0] = transfer[&(i, s)].0.clone();
        }
        let f = GradedFunctor::new(piece.clone(), r, Functor::identity(&piece.base), obj_map, hom)
            .map_err(|e| DescentError::Malformed(format!("comparison with piece {i}: {e}")))?;
        isos.push(f);
    }
    Ok(Glued {
        cat,
        isos,
        class_of,
        representatives,
        hom_representatives,
    })
}

fn rep_dim<F: Scalar>(
    d: &DescentDatum<F>,
    rep_of_key: &HashMap<SharpKey, (usize, Mor)>,
    key: &SharpKey,
) -> usize {
    let (i, s) = rep_of_key[key];
    d.pieces[i].dim(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{chain_cover, FinCat};
    use crate::Q;

    fn vposet() -> CatRef {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn global_category_glues_back() {
        let p = vposet();
        // two objects over s, one over each t
        let c = Arc::new(
            FinCat::free_on_dag(
                &["a", "b", "c", "d"],
                &[("f", "a", "c"), ("g", "b", "c"), ("h", "a", "d")],
            )
            .unwrap(),
        );
        let proj = Functor::new(
            c.clone(),
            p.clone(),
            vec![Obj(0), Obj(0), Obj(1), Obj(2)],
            c.morphism_ids()
                .map(|m| {
                    let (s, t) = (c.src(m), c.tgt(m));
                    let image = |o: Obj| [Obj(0), Obj(0), Obj(1), Obj(2)][o.0];
                    p.hom(image(s), image(t))[0]
                })
                .collect(),
        )
        .unwrap();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::linearize(&proj));
        let cc = chain_cover(&p).unwrap();
        let (datum, deltas) = DescentDatum::from_global(&a, cc.chains.clone()).unwrap();
        let glued = glue_descent(&datum, GlueOptions::default()).unwrap();
        assert_eq!(glued.cat.num_objects(), 4);
        let cmp = glued.comparison(&a, &deltas).unwrap();
        assert!(cmp.is_isomorphism());
        assert!(glued.isos.iter().all(GradedFunctor::is_isomorphism));
    }

    #[test]
    fn free_chain_pieces_glue_to_free_poset() {
        let p = vposet();
        let cc = chain_cover(&p).unwrap();
        let pieces: Vec<Arc<GradedCat<Q>>> = cc
            .chains
            .iter()
            .map(|c| Arc::new(GradedCat::free(&c.source)))
            .collect();
        let datum = DescentDatum::trivial(cc.chains.clone(), pieces).unwrap();
        let glued = glue_descent(&datum, GlueOptions::default()).unwrap();
        let free: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        assert!(glued.cat.structurally_equal(&free));
        let deltas: Vec<_> = cc.chains.iter().map(|l| restrict(&free, l).1).collect();
        assert!(glued.comparison(&free, &deltas).unwrap().is_isomorphism());
    }

    #[test]
    fn scaled_transition_breaks_cocycle() {
        let a2 = Arc::new(FinCat::chain(1));
        let b: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&a2));
        let legs = vec![Functor::identity(&a2), Functor::identity(&a2)];
        let datum = DescentDatum::new(legs, vec![b.clone(), b], |i, j, ov| {
            let mut t = ov.identity_transition().unwrap();
            if (i, j) == (0, 1) {
                for m in ov.left.sharp_cat().morphism_ids() {
                    if !ov.left.sharp_cat().is_identity(m) {
                        t.hom[m.0] = Matrix::from_dense(1, 1, &[vec![q(2)]]);
                    }
                }
            }
            Ok(t)
        })
        .unwrap();
        match glue_descent(&datum, GlueOptions::default()) {
            Err(DescentError::CocycleViolated { i, j, k, .. }) => assert_eq!((i, j, k), (0, 1, 0)),
            other => panic!("expected a cocycle violation, got {other:?}"),
        }
    }

    #[test]
    fn swapped_objects_glue_by_class() {
        let e = Arc::new(FinCat::terminal());
        let two = Arc::new(FinCat::discrete(&["x", "y"]));
        let bang = Functor::new(two.clone(), e.clone(), vec![Obj(0), Obj(0)], vec![Mor(0), Mor(0)]).unwrap();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::linearize(&bang));
        let legs = vec![Functor::identity(&e), Functor::identity(&e)];
        let datum = DescentDatum::new(legs, vec![a.clone(), a.clone()], |i, j, ov| {
            let mut t = ov.identity_transition().unwrap();
            if i != j {
                t.obj_map = vec![1, 0];
                let sc = ov.left.sharp_cat();
                t.hom = sc
                    .morphism_ids()
                    .map(|m| {
                        let (u, x, y) = ov.left.key(m);
                        let image = ov.right.sharp_mor(u, 1 - x, 1 - y).unwrap();
                        Matrix::identity(ov.right.dim(image)).select_cols(&(0..ov.left.dim(m)).collect::<Vec<_>>())
                    })
                    .collect();
            }
            Ok(t)
        })
        .unwrap();
        let glued = glue_descent(&datum, GlueOptions::default()).unwrap();
        assert_eq!(glued.cat.num_objects(), 2);
        assert_eq!(glued.class_of[1], vec![1, 0]);
        assert!(glued.isos.iter().all(GradedFunctor::is_isomorphism));
    }

    #[test]
    fn objects_only_do_not_cover() {
        let p = vposet();
        let legs: Vec<Functor> = p
            .object_ids()
            .map(|o| {
                let (c, objs, mors) = p.full_subcategory(&[o]);
                Functor::from_sub(Arc::new(c), p.clone(), objs, mors)
            })
            .collect();
        let pieces = legs
            .iter()
            .map(|l| Arc::new(GradedCat::<Q>::free(&l.source)))
            .collect();
        let datum = DescentDatum::trivial(legs, pieces).unwrap();
        assert!(matches!(
            glue_descent(&datum, GlueOptions::default()),
            Err(DescentError::InsufficientCover { .. })
        ));
        assert!(matches!(
            glue_descent(&datum, GlueOptions { assume_cover: true }),
            Err(DescentError::NotCovered(_))
        ));
    }
}
