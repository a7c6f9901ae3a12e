use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bimod::Bimodule;
use crate::fincat::{CatRef, Functor, Mor, Obj};
use crate::hochschild::{plain_restriction, ChainMap, Convention, DegreeVerdict, HochschildComplex};
use crate::mapgraded::{GradedCat, GradedFunctor};
use crate::qlinalg::{Matrix, Subquotient};
use crate::scalar::Scalar;

use super::{base_change, by_right, composable_pairs, grothendieck, slice, slice_map, sparse, Coherence, GrothError, Grothendieck, PseudoFunctor, Slice};

/// A strict diagram of graded functors `F_c: 𝔞_C → 𝔞_{C'}` for `c: C → C'`
/// with `F_{c_2 c_1} = F_{c_2} F_{c_1}`.
#[derive(Clone, Debug)]
pub struct FunctorialDiagram<F: Scalar> {
    pub base: CatRef,
    pub pieces: Vec<Arc<GradedCat<F>>>,
    /// One functor per non-identity morphism.
    pub functors: HashMap<Mor, GradedFunctor<F>>,
}

fn same_functor<F: Scalar>(f: &GradedFunctor<F>, g: &GradedFunctor<F>) -> bool {
    f.base.obj_map() == g.base.obj_map()
        && f.base.mor_map() == g.base.mor_map()
        && f.obj_map() == g.obj_map()
        && f.homs() == g.homs()
}

impl<F: Scalar> FunctorialDiagram<F> {
    pub fn new(
        base: CatRef,
        pieces: Vec<Arc<GradedCat<F>>>,
        functors: HashMap<Mor, GradedFunctor<F>>,
    ) -> Result<Self, GrothError> {
        if pieces.len() != base.num_objects() {
            return Err(GrothError::Shape(format!(
                "{} pieces over a base with {} objects",
                pieces.len(),
                base.num_objects()
            )));
        }
        let same = |a: &Arc<GradedCat<F>>, b: &Arc<GradedCat<F>>| Arc::ptr_eq(a, b) || a.structurally_equal(b);
        for m in base.morphism_ids().filter(|&m| !base.is_identity(m)) {
            let name = base.mor_name(m);
            let f = functors
                .get(&m)
                .ok_or_else(|| GrothError::Diagram(format!("no functor for {name}")))?;
            if !same(&f.source, &pieces[base.src(m).0]) || !same(&f.target, &pieces[base.tgt(m).0]) {
                return Err(GrothError::Diagram(format!("functor of {name} does not go between its end pieces")));
            }
        }
        if functors.keys().any(|m| m.0 >= base.num_morphisms() || base.is_identity(*m)) {
            return Err(GrothError::Diagram("functor given for an identity or unknown morphism".into()));
        }
        for (c2, c1) in composable_pairs(&base) {
            let c = base.compose(c2, c1).unwrap();
            let composite = functors[&c2].after(&functors[&c1]);
            let ok = if base.is_identity(c) {
                same_functor(&composite, &GradedFunctor::identity(&pieces[base.src(c1).0]))
            } else {
                same_functor(&composite, &functors[&c])
            };
            if !ok {
                return Err(GrothError::Diagram(format!(
                    "functor of {} o {} differs from the composite of the functors",
                    base.mor_name(c2),
                    base.mor_name(c1)
                )));
            }
        }
        Ok(FunctorialDiagram { base, pieces, functors })
    }

    /// The pseudofunctor `c ↦ M_{F_c}`: spaces `𝔞_{C'}(F_c B, A)`, composing
    /// `x ∘ F_{c_2}(y)`.
    pub fn pseudofunctor(&self) -> Result<PseudoFunctor<F>, GrothError> {
        let c = &self.base;
        let mut edges = Vec::new();
        let mut listing: HashMap<Mor, HashMap<(Obj, Mor), usize>> = HashMap::new();
        for m in c.morphism_ids() {
            if c.is_identity(m) {
                edges.push(Arc::new(Bimodule::identity(&self.pieces[c.src(m).0])));
                continue;
            }
            let f = &self.functors[&m];
            let (v, u) = (&f.base.source, &f.base.target);
            let mut index = HashMap::new();
            for b in v.object_ids() {
                for &x in u.out_mors(f.base.obj(b)) {
                    index.insert((b, x), index.len());
                }
            }
            listing.insert(m, index);
            edges.push(Arc::new(Bimodule::lower(f)));
        }
        let mut coherence = HashMap::new();
        for (c2, c1) in composable_pairs(c) {
            let c21 = c.compose(c2, c1).unwrap();
            let (f2, f1) = (&self.functors[&c2], &self.functors[&c1]);
            let (m2, m1) = (&edges[c2.0], &edges[c1.0]);
            let target = &self.pieces[c.tgt(c2).0];
            let mid = &self.pieces[c.tgt(c1).0];
            // element (V, u) of S_{F_c} in listing order
            let elems = |e: Mor| {
                let mut v: Vec<(Obj, Mor)> = vec![(Obj(0), Mor(0)); listing[&e].len()];
                for (&k, &i) in &listing[&e] {
                    v[i] = k;
                }
                v
            };
            let (e2, e1) = (elems(c2), elems(c1));
            let ub = &f2.base.target;
            let compose_into = |v: Obj, x: Mor| -> Option<usize> {
                if c.is_identity(c21) {
                    Some(x.0)
                } else {
                    listing[&c21].get(&(v, x)).copied()
                }
            };
            let mut coh = Coherence::empty();
            for (s1, &(v1, u1)) in e1.iter().enumerate() {
                for (s2, &(v2, u2)) in e2.iter().enumerate() {
                    if v2 != f1.base.target.tgt(u1) {
                        continue;
                    }
                    let x = ub.compose(u2, f2.base.mor(u1)).unwrap();
                    let s = compose_into(v1, x)
                        .ok_or_else(|| GrothError::Diagram("composite element missing".into()))?;
                    coh.carrier.insert((s2, s1), s);
                }
            }
            let right2 = by_right(m2);
            for k1 in (0..m1.num_spaces()).filter(|&k| m1.dim(k) > 0) {
                let (s1, b, a1) = m1.key(k1);
                let y = mid.sharp_mor(e1[s1].1, f1.obj(b), a1).unwrap();
                let fy = f2.image_mor(y);
                for &k2 in right2[a1].iter().filter(|&&k| m2.dim(k) > 0) {
                    let (s2, _, a2) = m2.key(k2);
                    let x = target.sharp_mor(e2[s2].1, f2.obj(a1), a2).unwrap();
                    for j in 0..m1.dim(k1) {
                        let fyj = f2.hom(y).column(j);
                        for i in 0..m2.dim(k2) {
                            let mut xi = vec![F::zero(); m2.dim(k2)];
                            xi[i] = F::one();
                            let v = sparse(&target.compose_vec(x, &xi, fy, &fyj));
                            if !v.is_empty() {
                                coh.products.insert((k2, i, k1, j), v);
                            }
                        }
                    }
                }
            }
            coherence.insert((c2, c1), coh);
        }
        PseudoFunctor::new(c.clone(), self.pieces.clone(), edges, coherence)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectVerdict {
    pub object: String,
    /// `dim HH^i(𝔞̃|_C)`.
    pub hh_local: Vec<usize>,
    /// `dim HH^i(𝔞_C)`.
    pub hh_piece: Vec<usize>,
    pub degrees: Vec<DegreeVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareVerdict {
    pub morphism: String,
    pub degrees: Vec<DegreeVerdict>,
}

/// Whether `F_C*: HH(𝔞̃|_C) → HH(𝔞_C)` is an isomorphism per object and
/// degree, and whether the squares `F_c* F_C* = F_{C'}* F̃_c*` commute on
/// cohomology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub convention: Convention,
    pub top: usize,
    pub objects: Vec<ObjectVerdict>,
    pub squares: Vec<SquareVerdict>,
}

impl ComparisonReport {
    pub fn holds(&self) -> bool {
        self.objects.iter().flat_map(|o| &o.degrees).all(|d| d.exact)
            && self.squares.iter().flat_map(|s| &s.degrees).all(|d| d.exact)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "comparison F_C*: HH(a~|_C) -> HH(a_C) [convention: {}, degrees 0..{}]", self.convention, self.top)?;
        let dims = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        for o in &self.objects {
            writeln!(f, "  {}: local {} | piece {}", o.object, dims(&o.hh_local), dims(&o.hh_piece))?;
            for d in o.degrees.iter().filter(|d| !d.exact) {
                writeln!(f, "    degree {}: FAILED ({})", d.degree, d.witness.as_deref().unwrap_or(""))?;
            }
        }
        for s in &self.squares {
            let bad: Vec<String> = s.degrees.iter().filter(|d| !d.exact).map(|d| d.degree.to_string()).collect();
            if bad.is_empty() {
                writeln!(f, "  square {}: commutes", s.morphism)?;
            } else {
                writeln!(f, "  square {}: fails in degrees {}", s.morphism, bad.join(", "))?;
            }
        }
        write!(f, "comparison: {}", if self.holds() { "isomorphism in all checked degrees" } else { "FAILED" })
    }
}

struct Local<F: Scalar> {
    slice: Slice,
    total: Grothendieck<F>,
    complex: HochschildComplex<F>,
    coh: Vec<Subquotient<F>>,
}

fn cohomology<F: Scalar>(c: &HochschildComplex<F>, top: usize) -> Vec<Subquotient<F>> {
    (0..=top).map(|i| c.segment().cohomology(i)).collect()
}

fn induced<F: Scalar>(m: &ChainMap<F>, from: &[Subquotient<F>], to: &[Subquotient<F>], i: usize) -> Result<Matrix<F>, String> {
    from[i]
        .induced(&m.components[i], &to[i])
        .ok_or_else(|| format!("degree {i}: map does not preserve cocycles"))
}

/// Identity-on-homs functor between two total categories over the same
/// pseudofunctor data, given on base objects, base morphisms and objects.
fn relabel<F: Scalar>(
    from: &Grothendieck<F>,
    to: &Grothendieck<F>,
    obj: impl Fn(Obj, Obj) -> Obj,
    mor: impl Fn(Mor, usize) -> Mor,
    object: impl Fn(Obj, usize) -> usize,
) -> Result<GradedFunctor<F>, GrothError> {
    let base = Functor::new(
        from.cat.base.clone(),
        to.cat.base.clone(),
        from.base_obj_origin.iter().map(|&(c, u)| obj(c, u)).collect(),
        from.base_mor_origin.iter().map(|&(c, s)| mor(c, s)).collect(),
    )
    .map_err(|e| GrothError::Diagram(e.to_string()))?;
    let objects = from.object_origin.iter().map(|&(c, a)| object(c, a)).collect();
    let homs = from
        .cat
        .sharp_cat()
        .morphism_ids()
        .map(|m| Matrix::identity(from.cat.dim(m)))
        .collect();
    GradedFunctor::new(from.cat.clone(), to.cat.clone(), base, objects, homs).map_err(|e| GrothError::Diagram(e.to_string()))
}

pub fn comparison_check<F: Scalar>(
    d: &FunctorialDiagram<F>,
    top: usize,
    convention: Convention,
) -> Result<ComparisonReport, GrothError> {
    let c = &d.base;
    if !c.is_delta() {
        return Err(GrothError::NotADelta);
    }
    for m in c.morphism_ids().filter(|&m| !c.is_identity(m)) {
        if !d.functors[&m].is_subcartesian() {
            return Err(GrothError::NotSubcartesian(c.mor_name(m).to_string()));
        }
    }
    let p = d.pseudofunctor()?;
    let total = grothendieck(&p)?;
    let mut locals = Vec::new();
    let mut pieces = Vec::new();
    let mut to_piece = Vec::new();
    let mut objects = Vec::new();
    for o in c.object_ids() {
        let sl = slice(c, o);
        let bc = base_change(&p, &total, &sl.projection)?;
        let local = bc.total;
        let piece = &d.pieces[o.0];
        let top_obj = sl.top(c);
        let id_top = sl.cat.id(top_obj);
        let base = Functor::new(
            piece.base.clone(),
            local.cat.base.clone(),
            piece.base.object_ids().map(|u| local.base_obj(top_obj, u)).collect(),
            piece.base.morphism_ids().map(|u| local.base_mor(id_top, u.0)).collect(),
        )
        .map_err(|e| GrothError::Diagram(e.to_string()))?;
        let homs = piece
            .sharp_cat()
            .morphism_ids()
            .map(|m| Matrix::identity(piece.dim(m)))
            .collect();
        let fc = GradedFunctor::new(
            piece.clone(),
            local.cat.clone(),
            base,
            (0..piece.num_objects()).map(|a| local.object(top_obj, a)).collect(),
            homs,
        )
        .map_err(|e| GrothError::Diagram(e.to_string()))?;
        let cl = HochschildComplex::plain(&local.cat, top, convention)?;
        let cp = HochschildComplex::plain(piece, top, convention)?;
        let r = plain_restriction(&fc, &cl, &cp)?;
        let (hl, hp) = (cohomology(&cl, top), cohomology(&cp, top));
        let mut degrees = Vec::new();
        for i in 0..=top {
            let failures = match induced(&r, &hl, &hp, i) {
                Ok(m) if m.nrows() == m.ncols() && m.is_invertible() => vec![],
                Ok(m) => vec![format!("induced map {}x{} is not invertible", m.nrows(), m.ncols())],
                Err(e) => vec![e],
            };
            degrees.push(DegreeVerdict::from_checks(i, failures));
        }
        objects.push(ObjectVerdict {
            object: c.obj_name(o).to_string(),
            hh_local: hl.iter().map(Subquotient::dim).collect(),
            hh_piece: hp.iter().map(Subquotient::dim).collect(),
            degrees,
        });
        locals.push(Local {
            slice: sl,
            total: local,
            complex: cl,
            coh: hl,
        });
        pieces.push((cp, hp));
        to_piece.push(r);
    }
    let mut squares = Vec::new();
    for m in c.morphism_ids().filter(|&m| !c.is_identity(m)) {
        let (s, t) = (c.src(m).0, c.tgt(m).0);
        let (from, to) = (&locals[s], &locals[t]);
        let sm = slice_map(c, &from.slice, &to.slice, m);
        let tilde = relabel(
            &from.total,
            &to.total,
            |x, u| to.total.base_obj(sm.obj(x), u),
            |f, e| to.total.base_mor(sm.mor(f), e),
            |x, a| to.total.object(sm.obj(x), a),
        )?;
        let r_tilde = plain_restriction(&tilde, &to.complex, &from.complex)?;
        let r_c = plain_restriction(&d.functors[&m], &pieces[t].0, &pieces[s].0)?;
        let mut degrees = Vec::new();
        for i in 0..=top {
            let check = || -> Result<bool, String> {
                let lhs = induced(&r_c, &pieces[t].1, &pieces[s].1, i)?.mul(&induced(&to_piece[t], &to.coh, &pieces[t].1, i)?);
                let rhs = induced(&to_piece[s], &from.coh, &pieces[s].1, i)?.mul(&induced(&r_tilde, &to.coh, &from.coh, i)?);
                Ok(lhs == rhs)
            };
            let failures = match check() {
                Ok(true) => vec![],
                Ok(false) => vec!["induced maps differ".to_string()],
                Err(e) => vec![e],
            };
            degrees.push(DegreeVerdict::from_checks(i, failures));
        }
        squares.push(SquareVerdict {
            morphism: c.mor_name(m).to_string(),
            degrees,
        });
    }
    Ok(ComparisonReport {
        convention,
        top,
        objects,
        squares,
    })
}
