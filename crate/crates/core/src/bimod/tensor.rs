use std::collections::HashMap;
use std::sync::Arc;

use super::{bimodule_keys, to_sparse, unit, BimodError, Bimodule, RawBimodule};
use crate::fincat::{Composite, Obj};
use crate::qlinalg::{Matrix, Quotient};
use crate::scalar::Scalar;

/// One summand `M_s(B, A) ⊗ N_t(C, B)` of the generators of a tensor space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Block {
    m: usize,
    n: usize,
    offset: usize,
}

/// `M ⊗_𝔟 N` with the presentation used to build it.
#[derive(Clone, Debug)]
pub struct Tensor<F: Scalar> {
    pub bimodule: Bimodule<F>,
    pub composite: Composite,
    blocks: Vec<Vec<Block>>,
    quotients: Vec<Quotient<F>>,
    n_dims: Vec<usize>,
}

impl<F: Scalar> Tensor<F> {
    /// Dimension of the generator space of tensor space `k` (before the
    /// relations are imposed).
    pub fn generators(&self, k: usize) -> usize {
        self.quotients[k].ambient
    }

    /// Tensor space containing `m ⊗ n` for `m` in space `mk` of the left
    /// factor and `n` in space `nk` of the right factor.
    pub fn space_of(&self, mk: usize, m: &Bimodule<F>, nk: usize, n: &Bimodule<F>) -> usize {
        let (s, _, a) = m.key(mk);
        let (t, c, _) = n.key(nk);
        let cls = self.composite.class_of[&(s, t)];
        self.bimodule.find((cls, c, a)).expect("tensor space")
    }

    /// Class of `x ⊗ y` for `x` in space `mk` and `y` in space `nk`.
    pub fn class(&self, mk: usize, x: &[F], nk: usize, y: &[F], m: &Bimodule<F>, n: &Bimodule<F>) -> (usize, Vec<F>) {
        let k = self.space_of(mk, m, nk, n);
        let q = &self.quotients[k];
        let Some(b) = self.blocks[k].iter().find(|b| b.m == mk && b.n == nk) else {
            return (k, vec![F::zero(); q.dim()]);
        };
        let dn = self.n_dims[nk];
        let mut g = vec![F::zero(); q.ambient];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                g[b.offset + i * dn + j] = xi.clone() * yj.clone();
            }
        }
        (k, q.projection.mul_vec(&g))
    }

    /// The chosen basis element `q` of tensor space `k` as a pure tensor:
    /// `(m space, m index, n space, n index)`.
    pub fn lift(&self, k: usize, q: usize) -> (usize, usize, usize, usize) {
        let g = self.quotients[k].complement[q];
        let b = self.blocks[k]
            .iter()
            .rev()
            .find(|b| b.offset <= g)
            .expect("generator block");
        let dn = self.n_dims[b.n];
        let r = g - b.offset;
        (b.m, r / dn, b.n, r % dn)
    }
}

/// `M ⊗_𝔟 N` for an `𝔞`-`S`-`𝔟`-bimodule `M` and a `𝔟`-`T`-`𝔠`-bimodule
/// `N`, over `S ∘ T`. Each space is the cokernel of
/// `(m·b) ⊗ n − m ⊗ (b·n)` on `⊕ M_s(B, A) ⊗ N_t(C, B)`.
pub fn tensor<F: Scalar>(m: &Bimodule<F>, n: &Bimodule<F>) -> Result<Tensor<F>, BimodError> {
    if !(Arc::ptr_eq(&m.right, &n.left) || m.right.structurally_equal(&n.left)) {
        return Err(BimodError::MiddleMismatch);
    }
    let (a, b, c) = (&m.left, &m.right, &n.right);
    let composite = m.carrier.compose(&n.carrier);
    let carrier = Arc::new(composite.bifunctor.clone());
    let keys = bimodule_keys(a, c, &carrier);
    let key_index: HashMap<_, _> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut blocks: Vec<Vec<Block>> = vec![Vec::new(); keys.len()];
    let mut ambient = vec![0usize; keys.len()];
    let mut block_of: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (ki, &(cls, cobj, aobj)) in keys.iter().enumerate() {
        for &(s, t) in &composite.members[cls] {
            for &bobj in b.fiber(m.carrier.elem(s).src) {
                let mk = m.find((s, bobj, aobj)).unwrap();
                let nk = n.find((t, cobj, bobj)).unwrap();
                let size = m.dim(mk) * n.dim(nk);
                if size == 0 {
                    continue;
                }
                block_of.insert((mk, nk), (ki, blocks[ki].len()));
                blocks[ki].push(Block {
                    m: mk,
                    n: nk,
                    offset: ambient[ki],
                });
                ambient[ki] += size;
            }
        }
    }
    // relations per tensor space, one column each
    let mut relations: Vec<Vec<Vec<(usize, F)>>> = vec![Vec::new(); keys.len()];
    let bsc = b.sharp_cat();
    let mut n_by_right: HashMap<usize, Vec<usize>> = HashMap::new();
    for nk in (0..n.num_spaces()).filter(|&k| n.dim(k) > 0) {
        n_by_right.entry(n.key(nk).2).or_default().push(nk);
    }
    for mk in (0..m.num_spaces()).filter(|&k| m.dim(k) > 0) {
        let bobj = m.key(mk).1;
        for h in bsc.hom_into(Obj(bobj)).into_iter().filter(|&h| b.dim(h) > 0) {
            let mh = m.right_target(mk, h);
            let Some(nks) = n_by_right.get(&b.key(h).1) else {
                continue;
            };
            for &nk in nks {
                let hn = n.left_target(h, nk);
                let (s, _, aobj) = m.key(mk);
                let (t, cobj, _) = n.key(nk);
                let cls = composite.class_of[&(m.carrier.act_right(s, b.key(h).0), t)];
                let ki = key_index[&(cls, cobj, aobj)];
                let left_block = block_of.get(&(mh, nk)).map(|&(_, i)| blocks[ki][i]);
                let right_block = block_of.get(&(mk, hn)).map(|&(_, i)| blocks[ki][i]);
                if left_block.is_none() && right_block.is_none() {
                    continue;
                }
                for l in 0..b.dim(h) {
                    let e = unit(b.dim(h), l);
                    let rm = m.right_action(mk, h, &e);
                    let ln = n.left_action(h, &e, nk);
                    for i in 0..m.dim(mk) {
                        let mi = rm.column(i);
                        for j in 0..n.dim(nk) {
                            let mut col: HashMap<usize, F> = HashMap::new();
                            if let Some(lb) = left_block {
                                let dn = n.dim(nk);
                                for (p, v) in mi.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                                    let slot = col.entry(lb.offset + p * dn + j).or_insert_with(F::zero);
                                    *slot = slot.clone() + v.clone();
                                }
                            }
                            if let Some(rb) = right_block {
                                let dn = n.dim(hn);
                                for (p, v) in ln.column(j).iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                                    let slot = col.entry(rb.offset + i * dn + p).or_insert_with(F::zero);
                                    *slot = slot.clone() - v.clone();
                                }
                            }
                            let mut col: Vec<(usize, F)> = col.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                            if !col.is_empty() {
                                col.sort_by_key(|e| e.0);
                                relations[ki].push(col);
                            }
                        }
                    }
                }
            }
        }
    }
    let quotients: Vec<Quotient<F>> = relations
        .iter()
        .enumerate()
        .map(|(ki, rels)| {
            let triplets = rels
                .iter()
                .enumerate()
                .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())));
            Quotient::new(&Matrix::from_triplets(ambient[ki], rels.len(), triplets))
        })
        .collect();
    let n_dims: Vec<usize> = (0..n.num_spaces()).map(|k| n.dim(k)).collect();
    let mut raw = RawBimodule {
        left: a.clone(),
        right: c.clone(),
        carrier: carrier.clone(),
        bases: HashMap::new(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    let partial = Tensor {
        bimodule: Bimodule::zero(a, c, &carrier),
        composite,
        blocks,
        quotients,
        n_dims,
    };
    for (ki, &key) in keys.iter().enumerate() {
        let q = &partial.quotients[ki];
        if q.dim() == 0 {
            continue;
        }
        let names = (0..q.dim())
            .map(|j| {
                let (mk, i, nk, l) = partial.lift(ki, j);
                format!("{}⊗{}", m.basis(mk)[i], n.basis(nk)[l])
            })
            .collect();
        raw.bases.insert(key, names);
    }
    let asc = a.sharp_cat();
    let csc = c.sharp_cat();
    for (ki, &key) in keys.iter().enumerate() {
        for j in 0..partial.quotients[ki].dim() {
            let (mk, i, nk, l) = partial.lift(ki, j);
            let y = unit(n.dim(nk), l);
            let x = unit(m.dim(mk), i);
            for &g in asc.out_mors(Obj(key.2)).iter().filter(|&&g| a.dim(g) > 0) {
                let gk = m.left_target(g, mk);
                for gi in 0..a.dim(g) {
                    let gm = m.left_action(g, &unit(a.dim(g), gi), mk).column(i);
                    let (_, v) = partial.class(gk, &gm, nk, &y, m, n);
                    let v = to_sparse(&v);
                    if !v.is_empty() {
                        raw.left_act.insert((g, gi, key, j), v);
                    }
                }
            }
            for h in csc.hom_into(Obj(key.1)).into_iter().filter(|&h| c.dim(h) > 0) {
                let nh = n.right_target(nk, h);
                for hi in 0..c.dim(h) {
                    let yh = n.right_action(nk, h, &unit(c.dim(h), hi)).column(l);
                    let (_, v) = partial.class(mk, &x, nh, &yh, m, n);
                    let v = to_sparse(&v);
                    if !v.is_empty() {
                        raw.right_act.insert((key, j, h, hi), v);
                    }
                }
            }
        }
    }
    let bimodule = Bimodule::assemble(raw).expect("tensor product");
    Ok(Tensor { bimodule, ..partial })
}
