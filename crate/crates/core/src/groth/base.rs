use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::bimod::{arrow_category, ArrowCategory, Bimodule, RawBimodule};
use crate::fincat::{is_n_injective, recognize_arrow, CatRef, Elem, FinCat, Functor, Ideal, Mor, MorData, Obj, SetBifunctor};
use crate::mapgraded::{restrict, GradedFunctor};
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

use super::{by_right, composable_pairs, dedupe, grothendieck, sparse, Coherence, GrothError, Grothendieck, PseudoFunctor};

/// The slice `𝒞/C`: objects are morphisms `x: X → C`, morphisms
/// `x_1 → x_2` are `f: X_1 → X_2` with `x_2 f = x_1`.
#[derive(Clone, Debug)]
pub struct Slice {
    pub apex: Obj,
    pub cat: CatRef,
    /// The morphism into the apex behind each object.
    pub over: Vec<Mor>,
    /// `(x_1, f, x_2)` behind each morphism.
    pub arrows: Vec<(Obj, Mor, Obj)>,
    /// `𝒞/C → 𝒞`, `x ↦ X`.
    pub projection: Functor,
    object_index: HashMap<Mor, Obj>,
    mor_index: HashMap<(Obj, Mor, Obj), Mor>,
}

impl Slice {
    pub fn object_of(&self, x: Mor) -> Option<Obj> {
        self.object_index.get(&x).copied()
    }

    pub fn mor_of(&self, x1: Obj, f: Mor, x2: Obj) -> Option<Mor> {
        self.mor_index.get(&(x1, f, x2)).copied()
    }

    /// The terminal object `1_C`.
    pub fn top(&self, c: &FinCat) -> Obj {
        self.object_index[&c.id(self.apex)]
    }
}

pub fn slice(c: &CatRef, apex: Obj) -> Slice {
    let over: Vec<Mor> = c.morphism_ids().filter(|&m| c.tgt(m) == apex).collect();
    let object_index: HashMap<Mor, Obj> = over.iter().enumerate().map(|(i, &m)| (m, Obj(i))).collect();
    let mut arrows = Vec::new();
    let mut names = Vec::new();
    for (i1, &x1) in over.iter().enumerate() {
        for (i2, &x2) in over.iter().enumerate() {
            for &f in c.hom(c.src(x1), c.src(x2)) {
                if c.compose(x2, f) == Some(x1) {
                    arrows.push((Obj(i1), f, Obj(i2)));
                    let n = c.mor_name(f).to_string();
                    names.push((n.clone(), format!("{n}@{}", c.mor_name(x2))));
                }
            }
        }
    }
    let mor_index: HashMap<(Obj, Mor, Obj), Mor> = arrows.iter().enumerate().map(|(i, &a)| (a, Mor(i))).collect();
    let morphisms: Vec<MorData> = dedupe(names)
        .into_iter()
        .zip(&arrows)
        .map(|(name, &(src, _, tgt))| MorData { name, src, tgt })
        .collect();
    let identity: Vec<Mor> = over
        .iter()
        .enumerate()
        .map(|(i, &x)| mor_index[&(Obj(i), c.id(c.src(x)), Obj(i))])
        .collect();
    let n = arrows.len();
    let mut comp = vec![None; n * n];
    for (g, &(y1, gm, y2)) in arrows.iter().enumerate() {
        for (f, &(x1, fm, x2)) in arrows.iter().enumerate() {
            if x2 == y1 {
                comp[g * n + f] = Some(mor_index[&(x1, c.compose(gm, fm).unwrap(), y2)]);
            }
        }
    }
    let objects = dedupe(
        over.iter()
            .map(|&x| {
                let n = c.mor_name(x).to_string();
                (n.clone(), format!("{n}:{}", c.obj_name(c.src(x))))
            })
            .collect(),
    );
    let cat: CatRef = Arc::new(FinCat::assemble(objects, morphisms, identity, comp));
    debug_assert!(cat.axiom_violations().is_empty());
    let projection = Functor::new(
        cat.clone(),
        c.clone(),
        over.iter().map(|&x| c.src(x)).collect(),
        arrows.iter().map(|a| a.1).collect(),
    )
    .expect("slice projection");
    Slice {
        apex,
        cat,
        over,
        arrows,
        projection,
        object_index,
        mor_index,
    }
}

/// `𝒞/C' → 𝒞/C`, `x ↦ c x`, for `c: C' → C`.
pub fn slice_map(c: &FinCat, from: &Slice, to: &Slice, m: Mor) -> Functor {
    assert!(c.src(m) == from.apex && c.tgt(m) == to.apex);
    let obj = |x: Obj| to.object_of(c.compose(m, from.over[x.0]).unwrap()).unwrap();
    Functor::new(
        from.cat.clone(),
        to.cat.clone(),
        from.cat.object_ids().map(obj).collect(),
        from.arrows
            .iter()
            .map(|&(x1, f, x2)| to.mor_of(obj(x1), f, obj(x2)).unwrap())
            .collect(),
    )
    .expect("slice functor")
}

/// `P ∘ Φ` with its total category and the cartesian functor
/// `Φ̃: ∫(P ∘ Φ) → ∫P` over `φ: Ũ^Φ → Ũ`.
#[derive(Clone, Debug)]
pub struct BaseChange<F: Scalar> {
    pub pseudo: PseudoFunctor<F>,
    pub total: Grothendieck<F>,
    pub phi: Functor,
    pub leg: GradedFunctor<F>,
    /// Whether `φ` is injective on composable pairs.
    pub n1_injective: bool,
}

impl<F: Scalar> BaseChange<F> {
    /// Compares `∫(P ∘ Φ)` with the restriction of `∫P` along `φ`; `None`
    /// when they agree up to the identity on objects and bases.
    pub fn restriction_mismatch(&self, total: &Grothendieck<F>) -> Option<String> {
        let (r, delta) = restrict(&total.cat, &self.phi);
        let src = &self.total.cat;
        let mut obj_map = Vec::new();
        for x in 0..src.num_objects() {
            let hit = (0..r.num_objects()).find(|&y| r.over(y) == src.over(x) && delta.obj(y) == self.leg.obj(x));
            match hit {
                Some(y) => obj_map.push(y),
                None => return Some(format!("object {} has no counterpart", src.obj_name(x))),
            }
        }
        let homs = src.sharp_cat().morphism_ids().map(|m| Matrix::identity(src.dim(m))).collect();
        let f = match GradedFunctor::new(src.clone(), r.clone(), Functor::identity(&src.base), obj_map, homs) {
            Ok(f) => f,
            Err(e) => return Some(e.to_string()),
        };
        if f.is_isomorphism() {
            None
        } else {
            Some("comparison functor is not an isomorphism".into())
        }
    }
}

pub fn base_change<F: Scalar>(
    p: &PseudoFunctor<F>,
    total: &Grothendieck<F>,
    phi: &Functor,
) -> Result<BaseChange<F>, GrothError> {
    if *phi.target != *p.base {
        return Err(GrothError::Shape("base change along a functor into another category".into()));
    }
    let d = &phi.source;
    let pieces = d.object_ids().map(|o| p.pieces[phi.obj(o).0].clone()).collect();
    let edges = d.morphism_ids().map(|m| p.edges[phi.mor(m).0].clone()).collect();
    let mut coherence = HashMap::new();
    for (d2, d1) in composable_pairs(d) {
        let (c2, c1) = (phi.mor(d2), phi.mor(d1));
        let (m2, m1) = (&p.edges[c2.0], &p.edges[c1.0]);
        let mut coh = Coherence::empty();
        for s1 in 0..m1.carrier.num_elems() {
            let t = m1.carrier.elem(s1).tgt;
            for s2 in (0..m2.carrier.num_elems()).filter(|&s| m2.carrier.elem(s).src == t) {
                coh.carrier.insert((s2, s1), p.compose_elem(c2, s2, c1, s1));
            }
        }
        let right2 = by_right(m2);
        for k1 in (0..m1.num_spaces()).filter(|&k| m1.dim(k) > 0) {
            for &k2 in right2[m1.key(k1).2].iter().filter(|&&k| m2.dim(k) > 0) {
                let (_, block) = p.compose_block(c2, k2, c1, k1).expect("composable spaces");
                let d1 = m1.dim(k1);
                for i in 0..m2.dim(k2) {
                    for j in 0..d1 {
                        let v = sparse(&block.column(i * d1 + j));
                        if !v.is_empty() {
                            coh.products.insert((k2, i, k1, j), v);
                        }
                    }
                }
            }
        }
        coherence.insert((d2, d1), coh);
    }
    let pseudo = PseudoFunctor {
        base: d.clone(),
        pieces,
        edges,
        coherence,
    };
    let g = grothendieck(&pseudo)?;
    let ub = &g.cat.base;
    let shape = |e: String| GrothError::Shape(format!("base change: {e}"));
    let obj_map = g
        .base_obj_origin
        .iter()
        .map(|&(o, u)| total.base_obj(phi.obj(o), u))
        .collect();
    let mor_map = g
        .base_mor_origin
        .iter()
        .map(|&(m, s)| total.base_mor(phi.mor(m), s))
        .collect();
    let base_functor = Functor::new(ub.clone(), total.cat.base.clone(), obj_map, mor_map).map_err(|e| shape(e.to_string()))?;
    let objects = g
        .object_origin
        .iter()
        .map(|&(o, a)| total.object(phi.obj(o), a))
        .collect();
    let homs = g.cat.sharp_cat().morphism_ids().map(|m| Matrix::identity(g.cat.dim(m))).collect();
    let leg = GradedFunctor::new(g.cat.clone(), total.cat.clone(), base_functor.clone(), objects, homs)
        .map_err(|e| shape(e.to_string()))?;
    if !leg.is_cartesian() {
        return Err(shape("induced functor is not cartesian".into()));
    }
    let n1_injective = is_n_injective(&base_functor, 1);
    Ok(BaseChange {
        pseudo,
        total: g,
        phi: base_functor,
        leg,
        n1_injective,
    })
}

/// `∫P ≅ ∫P|_{𝒞_0} →_N ∫P|_{𝒞_1}` for a thin ideal `Z` of `𝒞`, where `N`
/// collects the homs of `∫P` over `Z`.
#[derive(Clone, Debug)]
pub struct ArrowDecomposition<F: Scalar> {
    pub lower: BaseChange<F>,
    pub upper: BaseChange<F>,
    pub bimodule: Bimodule<F>,
    pub arrow: ArrowCategory<F>,
    /// `∫P|_{𝒞_0} →_N ∫P|_{𝒞_1} → ∫P`, an isomorphism.
    pub iso: GradedFunctor<F>,
}

pub fn arrow_decomposition<F: Scalar>(
    p: &PseudoFunctor<F>,
    total: &Grothendieck<F>,
    z: &Ideal,
) -> Result<ArrowDecomposition<F>, GrothError> {
    let shape = |e: String| GrothError::Shape(format!("arrow decomposition: {e}"));
    let rec = recognize_arrow(&p.base, z).map_err(|e| shape(e.to_string()))?;
    let lower = base_change(p, total, &rec.incl_v)?;
    let upper = base_change(p, total, &rec.incl_u)?;
    let (u0, u1, ut) = (&lower.total.cat.base, &upper.total.cat.base, &total.cat.base);
    let pre0: HashMap<Obj, Obj> = u0.object_ids().map(|o| (lower.phi.obj(o), o)).collect();
    let pre1: HashMap<Obj, Obj> = u1.object_ids().map(|o| (upper.phi.obj(o), o)).collect();
    let cross: Vec<Mor> = ut
        .morphism_ids()
        .filter(|&m| z.contains(total.base_mor_origin[m.0].0))
        .collect();
    let cross_index: HashMap<Mor, usize> = cross.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let elems = cross
        .iter()
        .map(|&m| Elem {
            name: ut.mor_name(m).to_string(),
            src: pre0[&ut.src(m)],
            tgt: pre1[&ut.tgt(m)],
        })
        .collect();
    let t = SetBifunctor::new(
        u1.clone(),
        u0.clone(),
        elems,
        |u, s| cross_index[&ut.compose(upper.phi.mor(u), cross[s]).unwrap()],
        |s, v| cross_index[&ut.compose(cross[s], lower.phi.mor(v)).unwrap()],
    )
    .map_err(|e| shape(e.to_string()))?;
    let (a0, a1, at) = (&lower.total.cat, &upper.total.cat, &total.cat);
    let (l0, l1) = (&lower.leg, &upper.leg);
    let mut raw = RawBimodule {
        left: a1.clone(),
        right: a0.clone(),
        carrier: Arc::new(t),
        bases: HashMap::new(),
        left_act: HashMap::new(),
        right_act: HashMap::new(),
    };
    // space (e, B, A) is the hom of the total category over cross[e]
    let mut hom_of = HashMap::new();
    for (e, &m) in cross.iter().enumerate() {
        for &b in a0.fiber(pre0[&ut.src(m)]) {
            for &a in a1.fiber(pre1[&ut.tgt(m)]) {
                let h = at.sharp_mor(m, l0.obj(b), l1.obj(a)).expect("total hom");
                hom_of.insert((e, b, a), h);
                if at.dim(h) > 0 {
                    raw.bases.insert((e, b, a), at.basis(h).to_vec());
                }
            }
        }
    }
    let sc1 = a1.sharp_cat();
    let sc0 = a0.sharp_cat();
    for (&(e, b, a), &h) in &hom_of {
        let dh = at.dim(h);
        if dh == 0 {
            continue;
        }
        for g in sc1.morphism_ids().filter(|&g| a1.key(g).1 == a) {
            let gt = l1.image_mor(g);
            for i in 0..a1.dim(g) {
                for j in 0..dh {
                    let v = at.product_sparse(gt, i, h, j);
                    if !v.is_empty() {
                        raw.left_act.insert((g, i, (e, b, a), j), v.to_vec());
                    }
                }
            }
        }
        for g in sc0.morphism_ids().filter(|&g| a0.key(g).2 == b) {
            let gt = l0.image_mor(g);
            for i in 0..dh {
                for j in 0..a0.dim(g) {
                    let v = at.product_sparse(h, i, gt, j);
                    if !v.is_empty() {
                        raw.right_act.insert(((e, b, a), i, g, j), v.to_vec());
                    }
                }
            }
        }
    }
    let bimodule = Bimodule::new(raw).map_err(|e| shape(e[0].to_string()))?;
    let arrow = arrow_category(&bimodule);
    let ab = &arrow.base;
    let mut obj_map = vec![Obj(0); ab.cat.num_objects()];
    let mut mor_map = vec![Mor(0); ab.cat.num_morphisms()];
    for v in u0.object_ids() {
        obj_map[ab.incl_v.obj(v).0] = lower.phi.obj(v);
    }
    for u in u1.object_ids() {
        obj_map[ab.incl_u.obj(u).0] = upper.phi.obj(u);
    }
    for v in u0.morphism_ids() {
        mor_map[ab.incl_v.mor(v).0] = lower.phi.mor(v);
    }
    for u in u1.morphism_ids() {
        mor_map[ab.incl_u.mor(u).0] = upper.phi.mor(u);
    }
    for (e, &m) in ab.cross.iter().enumerate() {
        mor_map[m.0] = cross[e];
    }
    let base = Functor::new(ab.cat.clone(), ut.clone(), obj_map, mor_map).map_err(|e| shape(e.to_string()))?;
    let nb = a0.num_objects();
    let objects = (0..arrow.cat.num_objects())
        .map(|x| if x < nb { l0.obj(x) } else { l1.obj(x - nb) })
        .collect();
    let homs = arrow
        .cat
        .sharp_cat()
        .morphism_ids()
        .map(|m| Matrix::identity(arrow.cat.dim(m)))
        .collect();
    let iso = GradedFunctor::new(arrow.cat.clone(), at.clone(), base, objects, homs).map_err(|e| shape(e.to_string()))?;
    if !iso.is_isomorphism() {
        return Err(shape("comparison with the arrow category is not an isomorphism".into()));
    }
    Ok(ArrowDecomposition {
        lower,
        upper,
        bimodule,
        arrow,
        iso,
    })
}

/// Peels the bottom object off a chain `0 → 1 → … → n` repeatedly, splitting
/// along the ideal of morphisms out of it. Returns one decomposition per
/// step, the last one over `n−1 → n`.
pub fn chain_unrolling<F: Scalar>(
    p: &PseudoFunctor<F>,
    total: &Grothendieck<F>,
) -> Result<Vec<ArrowDecomposition<F>>, GrothError> {
    let mut out = Vec::new();
    let mut current = (p.clone(), total.clone());
    loop {
        let c = current.0.base.clone();
        if !is_chain(&c) {
            return Err(GrothError::Shape("base is not a finite chain".into()));
        }
        if c.num_objects() < 2 {
            break;
        }
        let bottom = c
            .object_ids()
            .find(|&o| c.hom_into(o).len() == 1)
            .expect("bottom of a chain");
        let z = Ideal::new(c.clone(), c.out_mors(bottom).iter().copied().filter(|&m| !c.is_identity(m)))
            .ok_or_else(|| GrothError::Shape("morphisms out of the bottom do not form an ideal".into()))?;
        let dec = arrow_decomposition(&current.0, &current.1, &z)?;
        let next = (dec.upper.pseudo.clone(), dec.upper.total.clone());
        out.push(dec);
        current = next;
    }
    Ok(out)
}

fn is_chain(c: &FinCat) -> bool {
    if !c.is_poset() {
        return false;
    }
    let objs: Vec<Obj> = c.object_ids().collect();
    let seen: HashSet<(Obj, Obj)> = c.morphism_ids().map(|m| (c.src(m), c.tgt(m))).collect();
    objs.iter()
        .all(|&a| objs.iter().all(|&b| seen.contains(&(a, b)) || seen.contains(&(b, a))))
}
