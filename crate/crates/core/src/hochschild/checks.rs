use std::collections::HashSet;
use std::sync::Arc;

use crate::bimod::{restrict_bimodule, support_split, Bimodule};
use crate::fincat::{is_n_cover, is_n_injective, nerve, CoverDegree, Functor, Ideal, Mor, Simplex};
use crate::mapgraded::{pullback_graded, restrict, GradedCat, GradedFunctor};
use crate::qlinalg::{is_exact_sequence, ComplexSegment, ExactnessFailure, Flanks, Matrix};
use crate::scalar::Scalar;

use super::exact::{long_exact_sequence, short_exact_degrees, DegreeVerdict, ExactnessReport, LesTable};
use super::{
    coefficient_map, direct_sum, functor_label, plain_restriction, restriction_map, Block, ChainMap, Convention,
    HochschildComplex, HochschildError,
};

/// A sub-product of `C(𝔞, M)` closed under the differential, with its
/// inclusion.
#[derive(Clone, Debug)]
pub struct SupportComplex<F: Scalar> {
    pub segment: ComplexSegment<F>,
    pub inclusion: ChainMap<F>,
    /// Coordinates of `C^n` spanning the sub-product, per degree.
    pub coords: Vec<Vec<usize>>,
}

impl<F: Scalar> SupportComplex<F> {
    fn select(c: &HochschildComplex<F>, keep: impl Fn(&Block) -> bool) -> SupportComplex<F> {
        let coords: Vec<Vec<usize>> = (0..=c.top() + 1)
            .map(|n| {
                c.blocks(n)
                    .iter()
                    .filter(|b| keep(b))
                    .flat_map(|b| b.offset..b.offset + b.dim())
                    .collect()
            })
            .collect();
        let differentials = (0..=c.top())
            .map(|n| c.differential(n).select_rows(&coords[n + 1]).select_cols(&coords[n]))
            .collect();
        let inclusion = ChainMap {
            components: coords
                .iter()
                .enumerate()
                .map(|(n, idx)| {
                    Matrix::from_triplets(c.dim(n), idx.len(), idx.iter().enumerate().map(|(j, &i)| (i, j, F::one())))
                })
                .collect(),
        };
        SupportComplex {
            segment: ComplexSegment { differentials },
            inclusion,
            coords,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.coords.iter().map(Vec::len).collect()
    }
}

fn sharp_injective<F: Scalar>(f: &GradedFunctor<F>) -> Result<Functor, HochschildError> {
    let s = f.sharp_functor();
    if !is_n_injective(&s, 1) {
        return Err(HochschildError::Not1Injective(functor_label(f)));
    }
    Ok(s)
}

fn subcartesian<F: Scalar>(f: &GradedFunctor<F>) -> Result<(), HochschildError> {
    if f.is_subcartesian() {
        Ok(())
    } else {
        Err(HochschildError::NotSubcartesian(functor_label(f)))
    }
}

/// `C_{𝒰∖𝒱^♯}(𝔞, M)`: the factors over simplices outside the image of
/// `N(F^♯)`, for a 1-injective subcartesian `F`. It is the kernel of the
/// restriction along `F`.
pub fn support_complex<F: Scalar>(
    f: &GradedFunctor<F>,
    c: &HochschildComplex<F>,
) -> Result<SupportComplex<F>, HochschildError> {
    let sharp = sharp_injective(f)?;
    subcartesian(f)?;
    let image: HashSet<Simplex> = (0..=c.top() + 1)
        .flat_map(|n| nerve(f.source.sharp_cat(), n))
        .map(|s| s.image(&sharp))
        .collect();
    Ok(SupportComplex::select(c, |b| !image.contains(&b.simplex)))
}

/// Factors over simplices with at least one base morphism in the ideal.
pub fn ideal_support<F: Scalar>(c: &HochschildComplex<F>, z: &Ideal) -> SupportComplex<F> {
    let a = &c.source;
    SupportComplex::select(c, |b| b.simplex.mors.iter().any(|&g| z.contains(a.key(g).0)))
}

fn failures_of(maps: &[Matrix<impl Scalar>], flanks: Flanks) -> Vec<String> {
    match is_exact_sequence(maps, flanks) {
        Ok(e) => e.failures.iter().map(ExactnessFailure::to_string).collect(),
        Err(e) => vec![e.to_string()],
    }
}

/// Adds chain-map failures to the verdict of the degree where they occur.
fn note_chain_map<F: Scalar>(
    report: &mut ExactnessReport,
    name: &str,
    m: &ChainMap<F>,
    src: &ComplexSegment<F>,
    tgt: &ComplexSegment<F>,
) {
    if let Some(n) = m.commutation_failure(src, tgt) {
        let w = format!("{name} does not commute with d^{n}");
        match report.degrees.iter_mut().find(|d| d.degree == n) {
            Some(d) => {
                d.exact = false;
                d.witness = Some(match d.witness.take() {
                    Some(old) => format!("{old}; {w}"),
                    None => w,
                });
            }
            None => report.degrees.push(DegreeVerdict::from_checks(n, vec![w])),
        }
    }
}

/// `0 → C_{𝒰∖𝒱^♯}(𝔞, M) → C(𝔞, M) → C(𝔟, F*M) → 0` degreewise.
pub fn support_sequence_check<F: Scalar>(
    f: &GradedFunctor<F>,
    m: &Arc<Bimodule<F>>,
    top: usize,
    convention: Convention,
) -> Result<(ExactnessReport, SupportComplex<F>), HochschildError> {
    let ca = HochschildComplex::build(&f.target, m, top, convention)?;
    let pulled = Arc::new(restrict_bimodule(f, m).map_err(|_| HochschildError::CoefficientMismatch)?);
    let cb = HochschildComplex::build(&f.source, &pulled, top, convention)?;
    let supp = support_complex(f, &ca)?;
    let r = restriction_map(f, &ca, &cb)?;
    let mut report = ExactnessReport::new("support: 0 -> C_{U\\V}(a,M) -> C(a,M) -> C(b,F*M) -> 0", convention, top);
    report.notes.push(format!("support dims: {:?}", &supp.dims()[..=top]));
    report.degrees = short_exact_degrees(&supp.inclusion, &r, top);
    note_chain_map(&mut report, "restriction", &r, ca.segment(), cb.segment());
    note_chain_map(&mut report, "inclusion", &supp.inclusion, &supp.segment, ca.segment());
    Ok((report, supp))
}

/// Places blocks `(row offset, col offset, matrix)` into one matrix.
fn assemble<F: Scalar>(rows: usize, cols: usize, parts: &[(usize, usize, Matrix<F>)]) -> Matrix<F> {
    Matrix::from_triplets(
        rows,
        cols,
        parts
            .iter()
            .flat_map(|(r0, c0, m)| m.entries().map(move |(r, c, v)| (r0 + r, c0 + c, v.clone()))),
    )
}

/// Equalizer `0 → C^k(𝔞) → ∏_i C^k(𝔟_i) ⇉ ∏_{i≤j} C^k(𝔟_i ×_𝔞 𝔟_j)` for
/// `k ≤ degree`, for an `n`-cover by subcartesian functors.
pub fn sheaf_check<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    legs: &[GradedFunctor<F>],
    degree: usize,
    convention: Convention,
) -> Result<ExactnessReport, HochschildError> {
    for leg in legs {
        subcartesian(leg)?;
        if !Arc::ptr_eq(&leg.target, a) && !leg.target.structurally_equal(a) {
            return Err(HochschildError::ShapeMismatch("cover leg with another target".into()));
        }
    }
    let sharps: Vec<Functor> = legs.iter().map(GradedFunctor::sharp_functor).collect();
    let verdict = is_n_cover(a.sharp_cat(), &sharps, CoverDegree::Finite(degree));
    if !verdict.covered {
        let w = verdict.witness.map(|s| s.display(a.sharp_cat())).unwrap_or_default();
        return Err(HochschildError::CoverCheckFailed(format!("simplex {w} is not hit")));
    }
    let top = degree.max(1);
    let ca = HochschildComplex::plain(a, top, convention)?;
    let cbs = legs
        .iter()
        .map(|l| HochschildComplex::plain(&l.source, top, convention))
        .collect::<Result<Vec<_>, _>>()?;
    let rs = legs
        .iter()
        .zip(&cbs)
        .map(|(l, cb)| plain_restriction(l, &ca, cb))
        .collect::<Result<Vec<_>, _>>()?;
    let mut pairs = Vec::new();
    for i in 0..legs.len() {
        for j in i..legs.len() {
            let pb = pullback_graded(&legs[i], &legs[j]).map_err(|e| HochschildError::ShapeMismatch(e.to_string()))?;
            let cp = HochschildComplex::plain(&pb.cat, top, convention)?;
            let g1 = plain_restriction(&pb.p1, &cbs[i], &cp)?;
            let g2 = plain_restriction(&pb.p2, &cbs[j], &cp)?;
            pairs.push((i, j, cp, g1, g2));
        }
    }
    let mut report = ExactnessReport::new(
        format!("sheaf: C(a) -> prod C(b_i) => prod C(b_i x_a b_j), {} legs", legs.len()),
        convention,
        degree,
    );
    report.notes.push(format!("cover degree: {degree}"));
    for k in 0..=degree {
        let mut offsets = Vec::new();
        let mut acc = 0;
        for cb in &cbs {
            offsets.push(acc);
            acc += cb.dim(k);
        }
        let iota = Matrix::vstack(ca.dim(k), &rs.iter().map(|r| &r.components[k]).collect::<Vec<_>>());
        let mut parts = Vec::new();
        let mut row = 0;
        for (i, j, cp, g1, g2) in &pairs {
            parts.push((row, offsets[*i], g1.components[k].clone()));
            parts.push((row, offsets[*j], g2.components[k].neg()));
            row += cp.dim(k);
        }
        let diff = assemble(row, acc, &parts);
        report
            .degrees
            .push(DegreeVerdict::from_checks(k, failures_of(&[iota, diff], Flanks::LEFT)));
    }
    Ok(report)
}

/// `0 → C(𝔞) → C(𝔟_1) ⊕ C(𝔟_2) → C(𝔟_1 ×_𝔞 𝔟_2) → 0` with maps
/// `(F_1*, F_2*)` and `(−G_1*, G_2*)`, plus its long exact cohomology
/// sequence. The legs must be 1-injective, subcartesian and form an
/// ∞-cover (checked to `depth`, default `2·|Mor|` of the sharp base).
pub fn mayer_vietoris<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    f1: &GradedFunctor<F>,
    f2: &GradedFunctor<F>,
    top: usize,
    convention: Convention,
    depth: Option<usize>,
) -> Result<ExactnessReport, HochschildError> {
    let mut sharps = Vec::new();
    for f in [f1, f2] {
        subcartesian(f)?;
        sharps.push(sharp_injective(f)?);
    }
    let sc = a.sharp_cat();
    let degree = match depth {
        Some(depth) => CoverDegree::Infinite { depth },
        None => CoverDegree::infinite_default(sc),
    };
    let verdict = is_n_cover(sc, &sharps, degree);
    if !verdict.covered {
        let w = verdict.witness.map(|s| s.display(sc)).unwrap_or_default();
        return Err(HochschildError::NotACover(w));
    }
    let pb = pullback_graded(f1, f2).map_err(|e| HochschildError::ShapeMismatch(e.to_string()))?;
    let ca = HochschildComplex::plain(a, top, convention)?;
    let c1 = HochschildComplex::plain(&f1.source, top, convention)?;
    let c2 = HochschildComplex::plain(&f2.source, top, convention)?;
    let cp = HochschildComplex::plain(&pb.cat, top, convention)?;
    let r1 = plain_restriction(f1, &ca, &c1)?;
    let r2 = plain_restriction(f2, &ca, &c2)?;
    let g1 = plain_restriction(&pb.p1, &c1, &cp)?;
    let g2 = plain_restriction(&pb.p2, &c2, &cp)?;
    let f = ChainMap::stack(&[&r1, &r2]);
    let g = ChainMap::join(&[&g1.scaled(&-F::one()), &g2]);
    let mid = direct_sum(&[c1.segment(), c2.segment()]);
    let mut report = ExactnessReport::new("Mayer-Vietoris: 0 -> C(a) -> C(b1)+C(b2) -> C(b1 x_a b2) -> 0", convention, top);
    report.notes.push(format!(
        "cover depth: {} ({})",
        verdict.depth_checked,
        if verdict.exhaustive { "exhaustive" } else { "bounded" }
    ));
    report.degrees = short_exact_degrees(&f, &g, top);
    note_chain_map(&mut report, "(F1*, F2*)", &f, ca.segment(), &mid);
    note_chain_map(&mut report, "(-G1*, G2*)", &g, &mid, cp.segment());
    report.long_exact = Some(
        match long_exact_sequence(["a", "b1+b2", "b1 x_a b2"], ca.segment(), &mid, cp.segment(), &f, &g, top) {
            Ok(les) => les.table(),
            Err(msg) => failed_table(msg),
        },
    );
    Ok(report)
}

pub(crate) fn failed_table(msg: String) -> LesTable {
    LesTable {
        rows: Vec::new(),
        spots: vec![(msg, false)],
    }
}

/// Compares `0 → C_{𝒰∖𝒱}(𝔞, M) → C(𝔞, M) → C_𝒱(𝔟, M|_𝒱) → 0` (kernel of the
/// restriction along `𝒱`) with `0 → C(𝔞, M_𝒵) → C(𝔞, M) → C(𝔞, M_𝒱) → 0`
/// (support splitting of the coefficients): both must be short exact and
/// related by degreewise bijections `θ`, `ψ` that commute with the
/// differentials and with the maps of the sequences.
pub fn localization_check<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    m: &Arc<Bimodule<F>>,
    z: &Ideal,
    v: &Functor,
    top: usize,
    convention: Convention,
) -> Result<ExactnessReport, HochschildError> {
    let split = support_split(m, z, v).map_err(|_| HochschildError::NotADecomposition)?;
    let (b, delta) = restrict(a, v);
    let cm = HochschildComplex::build(a, m, top, convention)?;
    let cz = HochschildComplex::build(a, &Arc::new(split.sub.clone()), top, convention)?;
    let cv = HochschildComplex::build(a, &Arc::new(split.quotient.clone()), top, convention)?;
    let pulled = Arc::new(restrict_bimodule(&delta, m).map_err(|_| HochschildError::CoefficientMismatch)?);
    let cb = HochschildComplex::build(&b, &pulled, top, convention)?;
    let supp = support_complex(&delta, &cm)?;
    let restr = restriction_map(&delta, &cm, &cb)?;
    let iota = coefficient_map(&cz, &cm, &split.inclusion)?;
    let pi = coefficient_map(&cm, &cv, &split.projection)?;
    let mut theta = Vec::new();
    let mut psi = Vec::new();
    let mut report = ExactnessReport::new("localization: C(a,M_Z) ~ C_{U\\V}(a,M), C(a,M_V) ~ C_V(b,M|V)", convention, top);
    report.notes.push(format!("support dims: {:?}", &supp.dims()[..=top]));
    let kernel_seq = short_exact_degrees(&supp.inclusion, &restr, top);
    let coeff_seq = short_exact_degrees(&iota, &pi, top);
    for n in 0..=top + 1 {
        // ι = incl ∘ θ and ψ ∘ π = restr
        let t = supp.inclusion.components[n].solve(&iota.components[n]);
        let p = pi.components[n].transpose().solve(&restr.components[n].transpose()).map(|x| x.transpose());
        theta.push(t);
        psi.push(p);
    }
    for n in 0..=top {
        let mut fails = Vec::new();
        for (name, seq) in [("kernel sequence", &kernel_seq), ("coefficient sequence", &coeff_seq)] {
            if let Some(w) = &seq[n].witness {
                fails.push(format!("{name}: {w}"));
            }
        }
        for (name, maps, src, tgt) in [
            ("theta", &theta, cz.segment(), &supp.segment),
            ("psi", &psi, cv.segment(), cb.segment()),
        ] {
            match (&maps[n], &maps[n + 1]) {
                (Some(x), Some(y)) => {
                    if !x.is_invertible() {
                        fails.push(format!("{name} is not bijective"));
                    }
                    if tgt.differentials[n].mul(x) != y.mul(&src.differentials[n]) {
                        fails.push(format!("{name} does not commute with d"));
                    }
                }
                _ => fails.push(format!("{name} does not exist")),
            }
        }
        if let Some(p) = &psi[n] {
            if p.mul(&pi.components[n]) != restr.components[n] {
                fails.push("psi does not factor the restriction".into());
            }
        }
        report.degrees.push(DegreeVerdict::from_checks(n, fails));
    }
    Ok(report)
}

/// Outcome of [`censoring_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensoringVerdict {
    /// Every hom over a base morphism outside `𝒱` vanishes.
    pub censoring: bool,
    /// First nonzero hom outside `𝒱`.
    pub witness: Option<String>,
    /// Bijectivity of the restriction in degrees `0..=N`, when censoring.
    pub bijective: Vec<bool>,
}

impl CensoringVerdict {
    pub fn holds(&self) -> bool {
        self.censoring && self.bijective.iter().all(|b| *b)
    }
}

/// Whether `𝒱 ⊆ 𝒰` censors `𝔞`, and if so whether the restriction
/// `C(𝔞, M) → C_𝒱(𝔞|_𝒱, M|_𝒱)` is bijective through degree `top`.
pub fn censoring_check<F: Scalar>(
    a: &Arc<GradedCat<F>>,
    v: &Functor,
    m: &Arc<Bimodule<F>>,
    top: usize,
    convention: Convention,
) -> Result<CensoringVerdict, HochschildError> {
    let inside: HashSet<Mor> = v.mor_map().iter().copied().collect();
    let sc = a.sharp_cat();
    let witness = sc
        .morphism_ids()
        .find(|&g| a.dim(g) > 0 && !inside.contains(&a.key(g).0))
        .map(|g| a.hom_name(g));
    if witness.is_some() {
        return Ok(CensoringVerdict {
            censoring: false,
            witness,
            bijective: Vec::new(),
        });
    }
    let (b, delta) = restrict(a, v);
    let ca = HochschildComplex::build(a, m, top, convention)?;
    let pulled = Arc::new(restrict_bimodule(&delta, m).map_err(|_| HochschildError::CoefficientMismatch)?);
    let cb = HochschildComplex::build(&b, &pulled, top, convention)?;
    let r = restriction_map(&delta, &ca, &cb)?;
    Ok(CensoringVerdict {
        censoring: true,
        witness: None,
        bijective: (0..=top).map(|n| r.components[n].is_invertible()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimod::arrow_category;
    use crate::fincat::{FinCat, Obj};
    use crate::Q;

    fn vposet() -> Arc<FinCat> {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    fn sub(p: &Arc<FinCat>, names: &[&str]) -> Functor {
        let ids: Vec<Obj> = names.iter().map(|n| p.find_object(n).unwrap()).collect();
        let (c, o, m) = p.full_subcategory(&ids);
        Functor::from_sub(Arc::new(c), p.clone(), o, m)
    }

    fn piece(a: &Arc<GradedCat<Q>>, v: &Functor) -> GradedFunctor<Q> {
        restrict(a, v).1
    }

    #[test]
    fn sheaf_on_vposet_chains() {
        let p = vposet();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let legs = vec![piece(&a, &sub(&p, &["s", "t0"])), piece(&a, &sub(&p, &["s", "t1"]))];
        for conv in [Convention::Standard, Convention::Flipped] {
            let r = sheaf_check(&a, &legs, 3, conv).unwrap();
            assert!(r.is_exact(), "{r}");
            assert_eq!(r.degrees.len(), 4);
        }
        let id = vec![GradedFunctor::identity(&a)];
        assert!(sheaf_check(&a, &id, 2, Convention::Standard).unwrap().is_exact());
        // the two tips alone miss the arrows
        let tips = vec![piece(&a, &sub(&p, &["t0"])), piece(&a, &sub(&p, &["t1"]))];
        assert!(matches!(
            sheaf_check(&a, &tips, 1, Convention::Standard),
            Err(HochschildError::CoverCheckFailed(_))
        ));
    }

    #[test]
    fn mayer_vietoris_on_vposet() {
        let p = vposet();
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let f1 = piece(&a, &sub(&p, &["s", "t0"]));
        let f2 = piece(&a, &sub(&p, &["s", "t1"]));
        let r = mayer_vietoris(&a, &f1, &f2, 3, Convention::Standard, None).unwrap();
        assert!(r.is_exact(), "{r}");
        assert_eq!(r.summary(), "exact: yes (degrees 0..3)");
        let les = r.long_exact.unwrap();
        assert_eq!(les.rows[0].1, vec![1, 0, 0, 0]);
        assert_eq!(les.rows[1].1, vec![2, 0, 0, 0]);
        assert_eq!(les.rows[2].1, vec![1, 0, 0, 0]);
        // degenerate: both legs the identity
        let id = GradedFunctor::identity(&a);
        let r = mayer_vietoris(&a, &id, &id, 2, Convention::Standard, None).unwrap();
        assert!(r.is_exact(), "{r}");
        // not a cover
        let f3 = piece(&a, &sub(&p, &["t0"]));
        assert!(matches!(
            mayer_vietoris(&a, &f1, &f3, 2, Convention::Standard, None),
            Err(HochschildError::NotACover(_))
        ));
    }

    #[test]
    fn support_of_a_point_in_a2() {
        let a2 = Arc::new(FinCat::chain(1));
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&a2));
        let m = Arc::new(Bimodule::identity(&a));
        let (r, supp) = support_sequence_check(&piece(&a, &sub(&a2, &["0"])), &m, 3, Convention::Standard).unwrap();
        assert!(r.is_exact(), "{r}");
        assert!(supp.dims().iter().all(|d| *d > 0));
        let (r, supp) = support_sequence_check(&GradedFunctor::identity(&a), &m, 3, Convention::Standard).unwrap();
        assert!(r.is_exact());
        assert!(supp.dims().iter().all(|d| *d == 0));
    }

    #[test]
    fn support_of_the_disjoint_part_of_t2() {
        // simplices of k(A2) with the arrow u: n of them in degree n
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let arrow = arrow_category(&Bimodule::identity(&k));
        let c = HochschildComplex::plain(&arrow.cat, 3, Convention::Standard).unwrap();
        let s = ideal_support(&c, &arrow.base.ideal());
        assert_eq!(s.dims(), vec![0, 1, 2, 3, 4]);
        assert_eq!(s.inclusion.commutation_failure(&s.segment, c.segment()), None);
    }

    #[test]
    fn localization_on_a2_and_vposet() {
        let a2 = Arc::new(FinCat::chain(1));
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&a2));
        let m = Arc::new(Bimodule::identity(&a));
        let arrow = a2.morphism_ids().find(|&u| !a2.is_identity(u)).unwrap();
        let z = Ideal::new(a2.clone(), [arrow]).unwrap();
        let v = z.complement().unwrap();
        let r = localization_check(&a, &m, &z, &v, 3, Convention::Standard).unwrap();
        assert!(r.is_exact(), "{r}");
        // empty ideal
        let empty = Ideal::new(a2.clone(), []).unwrap();
        let r = localization_check(&a, &m, &empty, &Functor::identity(&a2), 2, Convention::Flipped).unwrap();
        assert!(r.is_exact(), "{r}");
    }

    #[test]
    fn censoring() {
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let zero = Bimodule::zero(&k, &k, &Arc::new(crate::fincat::SetBifunctor::identity(&k.base)));
        let arrow = arrow_category(&zero);
        let c = arrow.cat.clone();
        let m = Arc::new(Bimodule::identity(&c));
        let v = arrow.base.incl_disjoint();
        let verdict = censoring_check(&c, &v, &m, 3, Convention::Standard).unwrap();
        assert!(verdict.holds(), "{verdict:?}");
        let full = arrow_category(&Bimodule::identity(&k));
        let verdict = censoring_check(&full.cat, &full.base.incl_disjoint(), &Arc::new(Bimodule::identity(&full.cat)), 2, Convention::Standard).unwrap();
        assert!(!verdict.censoring);
        assert!(verdict.witness.is_some());
        let id = Functor::identity(&full.cat.base);
        assert!(censoring_check(&full.cat, &id, &Arc::new(Bimodule::identity(&full.cat)), 2, Convention::Standard)
            .unwrap()
            .holds());
    }
}
