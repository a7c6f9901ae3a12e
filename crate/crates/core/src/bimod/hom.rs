use std::collections::HashMap;
use std::sync::Arc;

use super::{bimodule_keys, to_sparse, unit, BimodError, Bimodule, RawBimodule};
use crate::fincat::{Mor, Obj, SetBifunctor};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

/// Unknown linear map `X: dom → cod` between two spaces, stored row-major
/// from `offset` in the variable vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct MapBlock {
    pub dom: usize,
    pub cod: usize,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

/// Linear system in a family of unknown maps, one per domain space.
#[derive(Clone, Debug)]
pub(crate) struct LinearMapSystem<F> {
    blocks: Vec<MapBlock>,
    index: HashMap<usize, usize>,
    nvars: usize,
    eqs: Vec<(usize, usize, F)>,
    neqs: usize,
}

impl<F: Scalar> LinearMapSystem<F> {
    pub fn new() -> Self {
        LinearMapSystem {
            blocks: Vec::new(),
            index: HashMap::new(),
            nvars: 0,
            eqs: Vec::new(),
            neqs: 0,
        }
    }

    /// Blocks with no entries are dropped; their maps are zero.
    pub fn add_block(&mut self, dom: usize, cod: usize, rows: usize, cols: usize) {
        if rows * cols == 0 {
            return;
        }
        self.index.insert(dom, self.blocks.len());
        self.blocks.push(MapBlock {
            dom,
            cod,
            rows,
            cols,
            offset: self.nvars,
        });
        self.nvars += rows * cols;
    }

    /// `X_{x2} · p − q · X_{x1} = 0`.
    pub fn intertwine(&mut self, x2: usize, p: &Matrix<F>, q: &Matrix<F>, x1: usize) {
        let b2 = self.index.get(&x2).map(|&i| self.blocks[i]);
        let b1 = self.index.get(&x1).map(|&i| self.blocks[i]);
        if b1.is_none() && b2.is_none() {
            return;
        }
        let (rows, cols) = (q.nrows(), p.ncols());
        let base = self.neqs;
        if let Some(b) = b2 {
            for (r0, c, v) in p.entries() {
                for r in 0..rows {
                    self.eqs.push((base + r * cols + c, b.offset + r * b.cols + r0, v.clone()));
                }
            }
        }
        if let Some(b) = b1 {
            for (r, q0, v) in q.entries() {
                for c in 0..cols {
                    self.eqs.push((base + r * cols + c, b.offset + q0 * b.cols + c, -v.clone()));
                }
            }
        }
        self.neqs += rows * cols;
    }

    pub fn solve(self) -> MapSpace<F> {
        let eqm = Matrix::from_triplets(self.neqs, self.nvars, self.eqs);
        let free = eqm.rref().free_columns();
        let basis = eqm.kernel_basis();
        MapSpace {
            blocks: self.blocks,
            index: self.index,
            nvars: self.nvars,
            basis,
            free,
        }
    }
}

/// Solution space of a [`LinearMapSystem`].
#[derive(Clone, Debug)]
pub(crate) struct MapSpace<F: Scalar> {
    pub blocks: Vec<MapBlock>,
    index: HashMap<usize, usize>,
    nvars: usize,
    basis: Matrix<F>,
    free: Vec<usize>,
}

impl<F: Scalar> MapSpace<F> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn block(&self, dom: usize) -> Option<MapBlock> {
        self.index.get(&dom).map(|&i| self.blocks[i])
    }

    /// The map on `dom` of the `q`-th basis family, if that block exists.
    pub fn component(&self, q: usize, dom: usize) -> Option<Matrix<F>> {
        let b = self.block(dom)?;
        let col = self.basis.column(q);
        let mut m = Matrix::zeros(b.rows, b.cols);
        for r in 0..b.rows {
            for c in 0..b.cols {
                let v = &col[b.offset + r * b.cols + c];
                if !v.is_zero() {
                    m.set(r, c, v.clone());
                }
            }
        }
        Some(m)
    }

    /// Flattens a family given blockwise; missing blocks are zero.
    pub fn flatten(&self, family: impl Fn(&MapBlock) -> Option<Matrix<F>>) -> Vec<F> {
        let mut v = vec![F::zero(); self.nvars];
        for b in &self.blocks {
            if let Some(m) = family(b) {
                debug_assert_eq!((m.nrows(), m.ncols()), (b.rows, b.cols));
                for (r, c, x) in m.entries() {
                    v[b.offset + r * b.cols + c] = x.clone();
                }
            }
        }
        v
    }

    /// Coordinates of a solution in the kernel basis.
    pub fn coordinates(&self, v: &[F]) -> Vec<F> {
        let coords: Vec<F> = self.free.iter().map(|&f| v[f].clone()).collect();
        debug_assert_eq!(self.basis.mul_vec(&coords), v, "family is not a solution");
        coords
    }
}

/// Space of bimodule morphisms `P → Q` over a map of carriers.
#[derive(Clone, Debug)]
pub struct MorphismSpace<F: Scalar> {
    space: MapSpace<F>,
}

impl<F: Scalar> MorphismSpace<F> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Component of the `q`-th basis morphism on space `k` of the domain.
    pub fn component(&self, q: usize, k: usize) -> Option<Matrix<F>> {
        self.space.component(q, k)
    }
}

/// Morphisms `P → Q` of bimodules with the same left and right categories,
/// over the carrier map `phi` (assumed natural).
pub fn morphism_space<F: Scalar>(
    p: &Bimodule<F>,
    q: &Bimodule<F>,
    phi: impl Fn(usize) -> usize,
) -> Result<MorphismSpace<F>, BimodError> {
    if !same_cat(&p.left, &q.left) || !same_cat(&p.right, &q.right) {
        return Err(BimodError::ShapeMismatch);
    }
    let cod = |k: usize| {
        let (s, b, a) = p.key(k);
        q.find((phi(s), b, a)).expect("carrier map lands in the codomain")
    };
    let mut sys = LinearMapSystem::new();
    for k in 0..p.num_spaces() {
        sys.add_block(k, cod(k), q.dim(cod(k)), p.dim(k));
    }
    let (a, b) = (&p.left, &p.right);
    for k in (0..p.num_spaces()).filter(|&k| p.dim(k) > 0) {
        let (_, bo, ao) = p.key(k);
        let qk = cod(k);
        for &g in a.sharp_cat().out_mors(Obj(ao)).iter().filter(|&&g| a.dim(g) > 0) {
            let pk2 = p.left_target(g, k);
            for l in 0..a.dim(g) {
                let e = unit(a.dim(g), l);
                sys.intertwine(pk2, &p.left_action(g, &e, k), &q.left_action(g, &e, qk), k);
            }
        }
        for h in b.sharp_cat().hom_into(Obj(bo)).into_iter().filter(|&h| b.dim(h) > 0) {
            let pk2 = p.right_target(k, h);
            for l in 0..b.dim(h) {
                let e = unit(b.dim(h), l);
                sys.intertwine(pk2, &p.right_action(k, h, &e), &q.right_action(qk, h, &e), k);
            }
        }
    }
    Ok(MorphismSpace { space: sys.solve() })
}

fn same_cat<F: Scalar>(x: &Arc<crate::mapgraded::GradedCat<F>>, y: &Arc<crate::mapgraded::GradedCat<F>>) -> bool {
    Arc::ptr_eq(x, y) || x.structurally_equal(y)
}

/// `Hom_𝔟(M, N)` (an `𝔞`-bimodule over `1_U`) or `Hom_{𝔞^op}(M, N)` (a
/// `𝔟`-bimodule over `1_V`), with the solution spaces behind each space.
#[derive(Clone, Debug)]
pub struct HomBimodule<F: Scalar> {
    pub bimodule: Bimodule<F>,
    spaces: Vec<MapSpace<F>>,
}

impl<F: Scalar> HomBimodule<F> {
    /// Component on space `mk` of `M` of the `q`-th basis family of space
    /// `k`, as a matrix into the matching space of `N`.
    pub fn component(&self, k: usize, q: usize, mk: usize) -> Option<Matrix<F>> {
        self.spaces[k].component(q, mk)
    }

    /// Codomain space in `N` of the component on `mk`, if nonzero.
    pub fn component_target(&self, k: usize, mk: usize) -> Option<usize> {
        self.spaces[k].block(mk).map(|b| b.cod)
    }

    /// Coordinates of a family of maps (given per `M` space) in space `k`.
    pub fn coordinates(&self, k: usize, family: impl Fn(usize) -> Option<Matrix<F>>) -> Vec<F> {
        let sp = &self.spaces[k];
        sp.coordinates(&sp.flatten(|b| family(b.dom)))
    }
}

fn check_shared<F: Scalar>(m: &Bimodule<F>, n: &Bimodule<F>) -> Result<(), BimodError> {
    if same_cat(&m.left, &n.left) && same_cat(&m.right, &n.right) && *m.carrier == *n.carrier {
        Ok(())
    } else {
        Err(BimodError::ShapeMismatch)
    }
}

fn insert_action<F: Scalar>(target: &mut HashMap<(Mor, usize, super::BimodKey, usize), Vec<(usize, F)>>, key: (Mor, usize, super::BimodKey, usize), v: Vec<F>) {
    let v = to_sparse(&v);
    if !v.is_empty() {
        target.insert(key, v);
    }
}

/// `Hom_𝔟(M, N)_u(A, A')`: right `𝔟`-module maps `f_{s,B}: M_s(B, A) →
/// N_{us}(B, A')`. The left category acts by post-composition, on the right
/// by pre-composition with the left action on `M`.
pub fn hom_bimodules<F: Scalar>(m: &Bimodule<F>, n: &Bimodule<F>) -> Result<HomBimodule<F>, BimodError> {
    check_shared(m, n)?;
    let (a, b, s) = (&m.left, &m.right, &m.carrier);
    let carrier = Arc::new(SetBifunctor::identity(&a.base));
    let keys = bimodule_keys(a, a, &carrier);
    let mut by_left: HashMap<usize, Vec<usize>> = HashMap::new();
    for mk in (0..m.num_spaces()).filter(|&k| m.dim(k) > 0) {
        by_left.entry(m.key(mk).2).or_default().push(mk);
    }
    let cod = |u: usize, mk: usize, a2: usize| {
        let (e, bo, _) = m.key(mk);
        n.find((s.act_left(Mor(u), e), bo, a2)).unwrap()
    };
    let empty = Vec::new();
    let mut spaces = Vec::new();
    for &(u, a1, a2) in &keys {
        let mks = by_left.get(&a1).unwrap_or(&empty);
        let mut sys = LinearMapSystem::new();
        for &mk in mks {
            let nk = cod(u, mk, a2);
            sys.add_block(mk, nk, n.dim(nk), m.dim(mk));
        }
        for &mk in mks {
            let nk = cod(u, mk, a2);
            for h in b.sharp_cat().hom_into(Obj(m.key(mk).1)).into_iter().filter(|&h| b.dim(h) > 0) {
                let mk2 = m.right_target(mk, h);
                for l in 0..b.dim(h) {
                    let e = unit(b.dim(h), l);
                    sys.intertwine(mk2, &m.right_action(mk, h, &e), &n.right_action(nk, h, &e), mk);
                }
            }
        }
        spaces.push(sys.solve());
    }
    let mut raw = RawBimodule {
        left: a.clone(),
        right: a.clone(),
        carrier: carrier.clone(),
        bases: HashMap::new(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    for (k, key) in keys.iter().enumerate() {
        if spaces[k].dim() > 0 {
            raw.bases.insert(*key, (0..spaces[k].dim()).map(|i| format!("h{i}")).collect());
        }
    }
    let index: HashMap<_, _> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let sc = a.sharp_cat();
    for (k, &(u, a1, a2)) in keys.iter().enumerate() {
        let sp = &spaces[k];
        for q in 0..sp.dim() {
            // post-composition by g: A' → A''
            for &g in sc.out_mors(Obj(a2)).iter().filter(|&&g| a.dim(g) > 0) {
                let (gu, _, a3) = a.key(g);
                let tk = index[&(sc_base_compose(a, gu, Mor(u)), a1, a3)];
                for i in 0..a.dim(g) {
                    let e = unit(a.dim(g), i);
                    let v = spaces[tk].flatten(|blk| {
                        let x = sp.component(q, blk.dom)?;
                        let nk = sp.block(blk.dom)?.cod;
                        Some(n.left_action(g, &e, nk).mul(&x))
                    });
                    insert_action(&mut raw.left_act, (g, i, (u, a1, a2), q), spaces[tk].coordinates(&v));
                }
            }
            // pre-composition by g: A0 → A
            for h in sc.hom_into(Obj(a1)).into_iter().filter(|&h| a.dim(h) > 0) {
                let (hu, a0, _) = a.key(h);
                let tk = index[&(sc_base_compose(a, Mor(u), hu), a0, a2)];
                for j in 0..a.dim(h) {
                    let e = unit(a.dim(h), j);
                    let v = spaces[tk].flatten(|blk| {
                        let mk2 = m.left_target(h, blk.dom);
                        let x = sp.component(q, mk2)?;
                        Some(x.mul(&m.left_action(h, &e, blk.dom)))
                    });
                    let key = (u, a1, a2);
                    let v = to_sparse(&spaces[tk].coordinates(&v));
                    if !v.is_empty() {
                        raw.right_act.insert((key, q, h, j), v);
                    }
                }
            }
        }
    }
    Ok(HomBimodule {
        bimodule: Bimodule::assemble(raw).expect("hom bimodule"),
        spaces,
    })
}

fn sc_base_compose<F: Scalar>(a: &crate::mapgraded::GradedCat<F>, g: Mor, f: Mor) -> usize {
    a.base.compose(g, f).unwrap().0
}

/// `Hom_{𝔞^op}(M, N)_v(B, B')`: left `𝔞`-module maps `f_{s,A}: M_s(B', A) →
/// N_{sv}(B, A)`, a `𝔟`-bimodule over `1_V`.
pub fn hom_op<F: Scalar>(m: &Bimodule<F>, n: &Bimodule<F>) -> Result<HomBimodule<F>, BimodError> {
    check_shared(m, n)?;
    let (a, b, s) = (&m.left, &m.right, &m.carrier);
    let carrier = Arc::new(SetBifunctor::identity(&b.base));
    let keys = bimodule_keys(b, b, &carrier);
    let mut by_right: HashMap<usize, Vec<usize>> = HashMap::new();
    for mk in (0..m.num_spaces()).filter(|&k| m.dim(k) > 0) {
        by_right.entry(m.key(mk).1).or_default().push(mk);
    }
    let cod = |v: usize, mk: usize, b1: usize| {
        let (e, _, ao) = m.key(mk);
        n.find((s.act_right(e, Mor(v)), b1, ao)).unwrap()
    };
    let empty = Vec::new();
    let mut spaces = Vec::new();
    for &(v, b1, b2) in &keys {
        let mks = by_right.get(&b2).unwrap_or(&empty);
        let mut sys = LinearMapSystem::new();
        for &mk in mks {
            let nk = cod(v, mk, b1);
            sys.add_block(mk, nk, n.dim(nk), m.dim(mk));
        }
        for &mk in mks {
            let nk = cod(v, mk, b1);
            for &g in a.sharp_cat().out_mors(Obj(m.key(mk).2)).iter().filter(|&&g| a.dim(g) > 0) {
                let mk2 = m.left_target(g, mk);
                for l in 0..a.dim(g) {
                    let e = unit(a.dim(g), l);
                    sys.intertwine(mk2, &m.left_action(g, &e, mk), &n.left_action(g, &e, nk), mk);
                }
            }
        }
        spaces.push(sys.solve());
    }
    let mut raw = RawBimodule {
        left: b.clone(),
        right: b.clone(),
        carrier: carrier.clone(),
        bases: HashMap::new(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    for (k, key) in keys.iter().enumerate() {
        if spaces[k].dim() > 0 {
            raw.bases.insert(*key, (0..spaces[k].dim()).map(|i| format!("h{i}")).collect());
        }
    }
    let index: HashMap<_, _> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let sc = b.sharp_cat();
    for (k, &(v, b1, b2)) in keys.iter().enumerate() {
        let sp = &spaces[k];
        for q in 0..sp.dim() {
            // b' · f with b': B' → B'' acts through the right action on M
            for &g in sc.out_mors(Obj(b2)).iter().filter(|&&g| b.dim(g) > 0) {
                let (gv, _, b3) = b.key(g);
                let tk = index[&(sc_base_compose(b, gv, Mor(v)), b1, b3)];
                for i in 0..b.dim(g) {
                    let e = unit(b.dim(g), i);
                    let w = spaces[tk].flatten(|blk| {
                        let mk2 = m.right_target(blk.dom, g);
                        let x = sp.component(q, mk2)?;
                        Some(x.mul(&m.right_action(blk.dom, g, &e)))
                    });
                    insert_action(&mut raw.left_act, (g, i, (v, b1, b2), q), spaces[tk].coordinates(&w));
                }
            }
            // f · b with b: B0 → B acts through the right action on N
            for h in sc.hom_into(Obj(b1)).into_iter().filter(|&h| b.dim(h) > 0) {
                let (hv, b0, _) = b.key(h);
                let tk = index[&(sc_base_compose(b, Mor(v), hv), b0, b2)];
                for j in 0..b.dim(h) {
                    let e = unit(b.dim(h), j);
                    let w = spaces[tk].flatten(|blk| {
                        let x = sp.component(q, blk.dom)?;
                        let nk = sp.block(blk.dom)?.cod;
                        Some(n.right_action(nk, h, &e).mul(&x))
                    });
                    let w = to_sparse(&spaces[tk].coordinates(&w));
                    if !w.is_empty() {
                        raw.right_act.insert(((v, b1, b2), q, h, j), w);
                    }
                }
            }
        }
    }
    Ok(HomBimodule {
        bimodule: Bimodule::assemble(raw).expect("hom bimodule"),
        spaces,
    })
}

/// The canonical morphism `1_𝔞 → Hom_𝔟(M, M)`, `a ↦ (m ↦ a·m)`: one matrix
/// per space of `1_𝔞` (spaces of both sides are listed in the same order).
pub fn canonical_to_hom<F: Scalar>(m: &Bimodule<F>, hom: &HomBimodule<F>) -> Vec<Matrix<F>> {
    let a = &m.left;
    let one = Bimodule::identity(a);
    (0..one.num_spaces())
        .map(|k| {
            let (u, a1, a2) = one.key(k);
            let g = a.sharp_mor(Mor(u), a1, a2).unwrap();
            let cols: Vec<Vec<F>> = (0..a.dim(g))
                .map(|i| {
                    let e = unit(a.dim(g), i);
                    hom.coordinates(k, |mk| Some(m.left_action(g, &e, mk)))
                })
                .collect();
            Matrix::from_columns(hom.bimodule.dim(k), &cols)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimod::tensor;
    use crate::fincat::FinCat;
    use crate::mapgraded::GradedCat;
    use crate::Q;

    #[test]
    fn hom_over_ground_field() {
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let one = Bimodule::identity(&k);
        let h = hom_bimodules(&one, &one).unwrap();
        assert_eq!(h.bimodule.total_dim(), 1);
        assert!(h.bimodule.axiom_violations().is_empty());
    }

    #[test]
    fn hom_over_dual_numbers() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let one = Bimodule::identity(&a);
        let h = hom_bimodules(&one, &one).unwrap();
        assert_eq!(h.bimodule.total_dim(), 2);
        assert!(h.bimodule.axiom_violations().is_empty());
        let can = canonical_to_hom(&one, &h);
        assert!(can[0].is_invertible());
        let op = hom_op(&one, &one).unwrap();
        assert_eq!(op.bimodule.total_dim(), 2);
        assert!(op.bimodule.axiom_violations().is_empty());
    }

    #[test]
    fn hom_over_poset() {
        let p = Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap());
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let one = Bimodule::identity(&a);
        let h = hom_bimodules(&one, &one).unwrap();
        assert!(h.bimodule.axiom_violations().is_empty());
        // Yoneda: Hom_𝔞(1, 1) ≅ 1 through the canonical map
        assert_eq!(h.bimodule.total_dim(), one.total_dim());
        for m in canonical_to_hom(&one, &h) {
            assert!(m.is_invertible());
        }
    }

    #[test]
    fn tensor_hom_adjunction_dimensions() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let one = Bimodule::identity(&a);
        let h = hom_bimodules(&one, &one).unwrap();
        let t = tensor(&one, &one).unwrap();
        let comp = &t.composite;
        let carrier = &one.carrier;
        let lhs = morphism_space(&t.bimodule, &one, |c| {
            let (u, s) = comp.members[c][0];
            carrier.act_left(Mor(u), s)
        })
        .unwrap();
        let rhs = morphism_space(&one, &h.bimodule, |s| s).unwrap();
        assert_eq!(lhs.dim(), rhs.dim());
        assert_eq!(lhs.dim(), 2);
    }
}
