use std::collections::HashMap;
use std::sync::Arc;

use crate::bimod::{arrow_category, ArrowCategory, Bimodule};
use crate::fincat::{Mor, Obj, Simplex};
use crate::mapgraded::GradedFunctor;
use crate::qlinalg::Matrix;
use crate::scalar::Scalar;

use super::checks::{failed_table, ideal_support, SupportComplex};
use super::exact::{long_exact_sequence, shifted, short_exact_degrees, DegreeVerdict, ExactnessReport};
use super::{direct_sum, plain_restriction, ChainMap, Convention, HochschildComplex, HochschildError};

/// The triangle `C(𝔠) → C(𝔟) ⊕ C(𝔞) → C(𝔠, (1_𝔠)_𝒮)[1]` of an arrow
/// category `𝔠 = 𝔟 →_M 𝔞`.
#[derive(Clone, Debug)]
pub struct Triangle<F: Scalar> {
    pub arrow: ArrowCategory<F>,
    /// `K = C(𝔠, (1_𝔠)_𝒮)`: factors over simplices through a cross morphism.
    pub support: SupportComplex<F>,
    /// `α^n: C^n(𝔞) → K^{n+1}`.
    pub alpha: ChainMap<F>,
    /// `β^n: C^n(𝔟) → K^{n+1}`.
    pub beta: ChainMap<F>,
    pub hh_c: Vec<usize>,
    pub hh_b: Vec<usize>,
    pub hh_a: Vec<usize>,
    /// `Ext^i(M, M) = H^{i+1}(K)` for `i < N`.
    pub ext: Vec<usize>,
    pub report: ExactnessReport,
}

/// Sharp morphisms of the target hit by an injective graded functor, mapped
/// back to the source.
fn preimages<F: Scalar>(f: &GradedFunctor<F>) -> HashMap<Mor, Mor> {
    f.source.sharp_cat().morphism_ids().map(|m| (f.image_mor(m), m)).collect()
}

/// Builds `α` and `β` from the explicit formulas
/// `β(ψ)(x, b_{n−1}, …, b_0) = ε_β x·ψ(b_{n−1}, …, b_0)` and
/// `α(φ)(a_{n−1}, …, a_0, x) = ε_α φ(a_{n−1}, …, a_0)·x`, with cross
/// morphisms `x: B → A`. Under the standard convention `ε_β = 1` and
/// `ε_α = (−1)^{n+1}`; the flipped convention multiplies both by `(−1)^n`.
/// With these signs `(β α)` is exactly the cochain-level connecting map
/// `d ∘ lift` of the short exact sequence.
pub fn connecting_maps<F: Scalar>(
    m: &Bimodule<F>,
    top: usize,
    convention: Convention,
) -> Result<Triangle<F>, HochschildError> {
    let arrow = arrow_category(m);
    let c = arrow.cat.clone();
    let cc = HochschildComplex::plain(&c, top, convention)?;
    let cb = HochschildComplex::plain(&arrow.incl_b.source, top, convention)?;
    let ca = HochschildComplex::plain(&arrow.incl_a.source, top, convention)?;
    let ideal = arrow.base.ideal();
    let k = ideal_support(&cc, &ideal);
    let rb = plain_restriction(&arrow.incl_b, &cc, &cb)?;
    let ra = plain_restriction(&arrow.incl_a, &cc, &ca)?;
    let g = ChainMap::stack(&[&rb, &ra]);
    let sum = direct_sum(&[cb.segment(), ca.segment()]);

    let sc = c.sharp_cat();
    let cross = |h: Mor| ideal.contains(c.key(h).0);
    let (pre_b, pre_a) = (preimages(&arrow.incl_b), preimages(&arrow.incl_a));
    let nb = arrow.incl_b.source.num_objects();
    let hom_col = |f: &GradedFunctor<F>, h: Mor, t: usize| -> Vec<(usize, F)> {
        f.hom(h).column(t).into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
    };
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for n in 0..=top {
        let k_index: HashMap<usize, usize> = k.coords[n + 1].iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let rows = k.coords[n + 1].len();
        let eb: F = F::from_i64(convention.twist(n));
        let ea: F = F::from_i64(convention.twist(n) * if n % 2 == 0 { -1 } else { 1 });
        let (mut tb, mut ta) = (Vec::new(), Vec::new());
        for tau in cc.blocks(n + 1) {
            let y = &tau.simplex.mors;
            if !y.iter().any(|&h| cross(h)) {
                continue;
            }
            let strides = tau.strides();
            if cross(y[n]) {
                let sigma_c = Simplex {
                    start: tau.simplex.start,
                    mors: y[..n].to_vec(),
                };
                let sigma_b = Simplex {
                    start: tau.simplex.start,
                    mors: y[..n].iter().map(|h| pre_b[h]).collect(),
                };
                if let Some(bb) = cb.block(&sigma_b) {
                    let comp = sigma_c.composite(sc);
                    let comp_b = sigma_b.composite(arrow.incl_b.source.sharp_cat());
                    for r in 0..tau.arity() {
                        let jn = r / strides[n];
                        let rest = r % strides[n];
                        for t2 in 0..bb.target {
                            for (q, cq) in hom_col(&arrow.incl_b, comp_b, t2) {
                                for (t, v) in c.product_sparse(y[n], jn, comp, q) {
                                    tb.push((
                                        k_index[&tau.coord(r, *t)],
                                        bb.coord(rest, t2),
                                        eb.clone() * cq.clone() * v.clone(),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            if cross(y[0]) {
                let sigma_c = Simplex {
                    start: sc.tgt(y[0]),
                    mors: y[1..].to_vec(),
                };
                let sigma_a = Simplex {
                    start: Obj(sigma_c.start.0 - nb),
                    mors: y[1..].iter().map(|h| pre_a[h]).collect(),
                };
                if let Some(ba) = ca.block(&sigma_a) {
                    let comp = sigma_c.composite(sc);
                    let comp_a = sigma_a.composite(arrow.incl_a.source.sharp_cat());
                    for r in 0..tau.arity() {
                        let j0 = r % tau.factors[0];
                        let rest = r / tau.factors[0];
                        for t2 in 0..ba.target {
                            for (q, cq) in hom_col(&arrow.incl_a, comp_a, t2) {
                                for (t, v) in c.product_sparse(comp, q, y[0], j0) {
                                    ta.push((
                                        k_index[&tau.coord(r, *t)],
                                        ba.coord(rest, t2),
                                        ea.clone() * cq.clone() * v.clone(),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        beta.push(Matrix::from_triplets(rows, cb.dim(n), tb));
        alpha.push(Matrix::from_triplets(rows, ca.dim(n), ta));
    }
    let alpha = ChainMap { components: alpha };
    let beta = ChainMap { components: beta };
    let joint = ChainMap::join(&[&beta, &alpha]);

    let mut report = ExactnessReport::new("arrow triangle: C(c) -> C(b)+C(a) -> C(c,(1_c)_S)[1]", convention, top);
    report.degrees = short_exact_degrees(&k.inclusion, &g, top);
    let k1 = shifted(&k.segment);
    let mut extra: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    for (name, map, src) in [("alpha", &alpha, ca.segment()), ("beta", &beta, cb.segment())] {
        if let Some(n) = map.commutation_failure(src, &k1) {
            extra[n].push(format!("{name} is not a chain map at d^{n}"));
        }
    }
    if let Some(n) = g.commutation_failure(cc.segment(), &sum) {
        extra[n].push(format!("restriction is not a chain map at d^{n}"));
    }
    // cochain-level connecting map d ∘ lift, with the lift dual to g
    let outside: Vec<Vec<usize>> = (0..=top + 1)
        .map(|n| {
            let inside: std::collections::HashSet<usize> = k.coords[n].iter().copied().collect();
            (0..cc.dim(n)).filter(|i| !inside.contains(i)).collect()
        })
        .collect();
    for n in 0..=top {
        let lift = g.components[n].transpose();
        if g.components[n].mul(&lift) != Matrix::identity(g.components[n].nrows()) {
            extra[n].push("restriction is not a coordinate projection".into());
            continue;
        }
        let dl = cc.differential(n).mul(&lift);
        let next_lift = g.components[n + 1].transpose();
        let defect = dl.sub(&next_lift.mul(&sum.differentials[n]));
        if !defect.select_rows(&outside[n + 1]).is_zero() {
            extra[n].push("d(lift) - lift(d) leaves the support".into());
        }
        if defect.select_rows(&k.coords[n + 1]) != joint.components[n] {
            extra[n].push("(beta alpha) differs from d(lift)".into());
        }
    }
    let les = long_exact_sequence(["K", "c", "b+a"], &k.segment, cc.segment(), &sum, &k.inclusion, &g, top);
    match &les {
        Ok(les) => {
            for i in 0..top {
                let induced = les.cohomology[2][i].induced(&joint.components[i], &les.cohomology[0][i + 1]);
                if induced.as_ref() != Some(&les.delta[i]) {
                    extra[i].push("(beta alpha) does not induce the connecting map".into());
                }
            }
            report.long_exact = Some(les.table());
        }
        Err(msg) => report.long_exact = Some(failed_table(msg.clone())),
    }
    for (n, fails) in extra.into_iter().enumerate() {
        if fails.is_empty() {
            continue;
        }
        let d = &mut report.degrees[n];
        let mut all: Vec<String> = d.witness.take().into_iter().collect();
        all.extend(fails);
        *d = DegreeVerdict::from_checks(n, all);
    }
    let kdims = k.segment.cohomology_dims().unwrap_or_default();
    let ext: Vec<usize> = kdims.iter().skip(1).copied().collect();
    report.notes.push(format!("Ext dims: {ext:?}"));
    Ok(Triangle {
        hh_c: cc.hh().dims,
        hh_b: cb.hh().dims,
        hh_a: ca.hh().dims,
        ext,
        arrow,
        support: k,
        alpha,
        beta,
        report,
    })
}

/// Restriction of a bimodule-valued triangle to plain arrow data over the
/// identity bimodule of one category.
pub fn regular_triangle<F: Scalar>(
    a: &Arc<crate::mapgraded::GradedCat<F>>,
    top: usize,
    convention: Convention,
) -> Result<Triangle<F>, HochschildError> {
    connecting_maps(&Bimodule::identity(a), top, convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::SetBifunctor;
    use crate::mapgraded::GradedCat;
    use crate::Q;

    #[test]
    fn t2_triangle() {
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        for conv in [Convention::Standard, Convention::Flipped] {
            let t = regular_triangle(&k, 3, conv).unwrap();
            assert!(t.report.is_exact(), "{}", t.report);
            assert_eq!(t.hh_c, vec![1, 0, 0, 0]);
            assert_eq!(t.support.dims(), vec![0, 1, 2, 3, 4]);
            assert_eq!(t.ext, vec![1, 0, 0]);
        }
    }

    #[test]
    fn dual_numbers_triangle() {
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        for conv in [Convention::Standard, Convention::Flipped] {
            let t = regular_triangle(&lam, 3, conv).unwrap();
            assert!(t.report.is_exact(), "{}", t.report);
            assert_eq!(t.hh_a[..3], [2, 1, 1]);
            assert_eq!(t.ext, vec![2, 1, 1]);
        }
    }

    #[test]
    fn zero_bimodule() {
        let lam: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let s = Arc::new(SetBifunctor::identity(&lam.base));
        let t = connecting_maps(&Bimodule::zero(&lam, &lam, &s), 2, Convention::Standard).unwrap();
        assert!(t.report.is_exact());
        assert!(t.support.dims().iter().all(|d| *d == 0));
        assert!(t.alpha.components.iter().all(Matrix::is_zero));
    }
}
