use std::fmt;
use std::sync::Arc;

use crate::fincat::{arrow_cat_base, chain_cover, ArrowBase, CatRef, Elem, FinCat, Functor, Mor, Obj, SetBifunctor};
use crate::hochschild::{mayer_vietoris, sheaf_check, Convention, ExactnessReport};
use crate::mapgraded::{pullback_graded, GradedFunctor};
use crate::scalar::Scalar;

use super::{base_change, grothendieck, slice, slice_map, GrothError, PseudoFunctor};

/// The diagram `C ↦ 𝔞̃|_C` on `𝒞*` and the sheaf check for the anchors.
#[derive(Clone, Debug)]
pub struct CStarReport {
    /// `𝒞 →_S e`: `𝒞` with a terminal object `*` adjoined.
    pub cstar: ArrowBase,
    pub anchors: Vec<String>,
    /// `(C_i, C_j, C_i × C_j)` for `i ≤ j`.
    pub products: Vec<(String, String, String)>,
    /// Each pullback `𝔞̃|_{C_i} ×_𝔞̃ 𝔞̃|_{C_j}` has the shape of `𝔞̃|_{C_i × C_j}`.
    pub overlaps_match: bool,
    /// `𝔞̃|_C → 𝔞̃|_{C'} → 𝔞̃` equals `𝔞̃|_C → 𝔞̃` for every `c: C → C'`.
    pub transitions_commute: bool,
    pub sheaf: ExactnessReport,
}

impl CStarReport {
    pub fn holds(&self) -> bool {
        self.overlaps_match && self.transitions_commute && self.sheaf.is_exact()
    }
}

impl fmt::Display for CStarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "C*: {} objects, anchors {}", self.cstar.cat.num_objects(), self.anchors.join(", "))?;
        for (a, b, p) in &self.products {
            writeln!(f, "  {a} x {b} = {p}")?;
        }
        writeln!(f, "  overlaps match slices over products: {}", yes_no(self.overlaps_match))?;
        writeln!(f, "  transition functors commute with the legs: {}", yes_no(self.transitions_commute))?;
        write!(f, "{}", self.sheaf)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn same_functor<F: Scalar>(f: &GradedFunctor<F>, g: &GradedFunctor<F>) -> bool {
    f.base.obj_map() == g.base.obj_map()
        && f.base.mor_map() == g.base.mor_map()
        && f.obj_map() == g.obj_map()
        && f.homs() == g.homs()
}

/// `𝒞` with one terminal object adjoined, as the arrow category `𝒞 →_S e`.
pub fn cstar_base(c: &CatRef) -> ArrowBase {
    let e: CatRef = Arc::new(FinCat::terminal());
    let elems = c
        .object_ids()
        .map(|o| Elem {
            name: format!("{}->*", c.obj_name(o)),
            src: o,
            tgt: Obj(0),
        })
        .collect();
    let s = SetBifunctor::new(e, c.clone(), elems, |_, s| s, |_, v| c.src(v).0).expect("cone bifunctor");
    arrow_cat_base(&s)
}

/// A product of `a` and `b` with its projections, found by checking the
/// universal property against every object.
pub fn find_product(c: &FinCat, a: Obj, b: Obj) -> Option<(Obj, Mor, Mor)> {
    for p in c.object_ids() {
        for &pa in c.hom(p, a) {
            for &pb in c.hom(p, b) {
                let universal = c.object_ids().all(|x| {
                    c.hom(x, a).iter().all(|&f| {
                        c.hom(x, b).iter().all(|&g| {
                            c.hom(x, p)
                                .iter()
                                .filter(|&&h| c.compose(pa, h) == Some(f) && c.compose(pb, h) == Some(g))
                                .count()
                                == 1
                        })
                    })
                });
                if universal {
                    return Some((p, pa, pb));
                }
            }
        }
    }
    None
}

pub fn cstar_diagram<F: Scalar>(
    p: &PseudoFunctor<F>,
    anchors: &[Obj],
    top: usize,
    convention: Convention,
) -> Result<CStarReport, GrothError> {
    let c = &p.base;
    if anchors.is_empty() {
        return Err(GrothError::Shape("no anchors".into()));
    }
    for o in c.object_ids() {
        if !anchors.iter().any(|&a| !c.hom(o, a).is_empty()) {
            return Err(GrothError::NoAnchorMap(c.obj_name(o).to_string()));
        }
    }
    let total = grothendieck(p)?;
    let slices: Vec<_> = c.object_ids().map(|o| slice(c, o)).collect();
    let locals = c
        .object_ids()
        .map(|o| base_change(p, &total, &slices[o.0].projection))
        .collect::<Result<Vec<_>, _>>()?;
    let mut transitions_commute = true;
    for m in c.morphism_ids() {
        let (s, t) = (c.src(m), c.tgt(m));
        let sm = slice_map(c, &slices[s.0], &slices[t.0], m);
        let (from, to) = (&locals[s.0].total, &locals[t.0].total);
        let obj_map = from
            .object_origin
            .iter()
            .map(|&(x, a)| to.object(sm.obj(x), a))
            .collect();
        let base = Functor::new(
            from.cat.base.clone(),
            to.cat.base.clone(),
            from.base_obj_origin.iter().map(|&(x, u)| to.base_obj(sm.obj(x), u)).collect(),
            from.base_mor_origin.iter().map(|&(f, e)| to.base_mor(sm.mor(f), e)).collect(),
        )
        .map_err(|e| GrothError::Diagram(e.to_string()))?;
        let homs = from
            .cat
            .sharp_cat()
            .morphism_ids()
            .map(|h| crate::qlinalg::Matrix::identity(from.cat.dim(h)))
            .collect();
        let tr = GradedFunctor::new(from.cat.clone(), to.cat.clone(), base, obj_map, homs)
            .map_err(|e| GrothError::Diagram(e.to_string()))?;
        transitions_commute &= tr.is_cartesian() && same_functor(&locals[t.0].leg.after(&tr), &locals[s.0].leg);
    }
    let legs: Vec<GradedFunctor<F>> = anchors.iter().map(|a| locals[a.0].leg.clone()).collect();
    let mut products = Vec::new();
    let mut overlaps_match = true;
    for i in 0..anchors.len() {
        for j in i..anchors.len() {
            let (a, b) = (anchors[i], anchors[j]);
            let (prod, _, _) = find_product(c, a, b)
                .ok_or_else(|| GrothError::MissingProduct(c.obj_name(a).to_string(), c.obj_name(b).to_string()))?;
            products.push((
                c.obj_name(a).to_string(),
                c.obj_name(b).to_string(),
                c.obj_name(prod).to_string(),
            ));
            let pb = pullback_graded(&legs[i], &legs[j]).map_err(|e| GrothError::Shape(e.to_string()))?;
            let over = &locals[prod.0].total.cat;
            overlaps_match &= pb.cat.num_objects() == over.num_objects()
                && pb.cat.total_dim() == over.total_dim()
                && pb.cat.base.num_morphisms() == over.base.num_morphisms();
        }
    }
    let mut sheaf = sheaf_check(&total.cat, &legs, top, convention)?;
    sheaf.label = format!("C* sheaf: C(a~) -> prod C(a~|_Ci) => prod C(a~|_CixCj), {} anchors", anchors.len());
    Ok(CStarReport {
        cstar: cstar_base(c),
        anchors: anchors.iter().map(|&a| c.obj_name(a).to_string()).collect(),
        products,
        overlaps_match,
        transitions_commute,
        sheaf,
    })
}

/// Sheaf and inductive Mayer-Vietoris checks for the cover of a poset by
/// its maximal chains.
#[derive(Clone, Debug)]
pub struct ChainCoverReport {
    pub chains: Vec<Vec<String>>,
    pub sheaf: ExactnessReport,
    /// First chain against the subcategory generated by the others; `None`
    /// for a single chain.
    pub mv: Option<ExactnessReport>,
}

impl ChainCoverReport {
    pub fn holds(&self) -> bool {
        self.sheaf.is_exact() && self.mv.as_ref().is_none_or(ExactnessReport::is_exact)
    }
}

impl fmt::Display for ChainCoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ch) in self.chains.iter().enumerate() {
            writeln!(f, "chain {i}: {}", ch.join(" < "))?;
        }
        write!(f, "{}", self.sheaf)?;
        match &self.mv {
            Some(mv) => write!(f, "\n{mv}"),
            None => write!(f, "\nMayer-Vietoris: single chain, nothing to split"),
        }
    }
}

pub fn chain_cover_mv<F: Scalar>(
    p: &PseudoFunctor<F>,
    top: usize,
    convention: Convention,
    depth: Option<usize>,
) -> Result<ChainCoverReport, GrothError> {
    let c = &p.base;
    if !c.is_poset() {
        return Err(GrothError::NotAPoset);
    }
    let cover = chain_cover(c).map_err(|e| GrothError::Shape(e.to_string()))?;
    let total = grothendieck(p)?;
    let legs = cover
        .chains
        .iter()
        .map(|ch| base_change(p, &total, ch).map(|b| b.leg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sheaf = sheaf_check(&total.cat, &legs, top, convention)?;
    sheaf.label = format!("chain cover sheaf: {} chains", legs.len());
    let mv = if cover.chains.len() < 2 {
        None
    } else {
        let rest = &cover.chains[1..];
        let objs: Vec<Obj> = rest.iter().flat_map(|f| f.obj_map().to_vec()).collect();
        let mors: Vec<Mor> = rest.iter().flat_map(|f| f.mor_map().to_vec()).collect();
        let (sub, so, sm) = c.generated_subcategory(&objs, &mors);
        let d1 = Functor::from_sub(Arc::new(sub), c.clone(), so, sm);
        let l0 = base_change(p, &total, &cover.chains[0])?.leg;
        let l1 = base_change(p, &total, &d1)?.leg;
        let mut r = mayer_vietoris(&total.cat, &l0, &l1, top, convention, depth)?;
        r.label = format!("chain cover Mayer-Vietoris: chain 0 against the other {}", rest.len());
        Some(r)
    };
    Ok(ChainCoverReport {
        chains: cover
            .chain_objects
            .iter()
            .map(|ch| ch.iter().map(|&o| c.obj_name(o).to_string()).collect())
            .collect(),
        sheaf,
        mv,
    })
}
