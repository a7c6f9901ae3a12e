//! Hochschild cochain complexes `C_𝒰(𝔞, M)` of graded categories with
//! bimodule coefficients, their restriction maps, and exactness checks for
//! the sequences relating them.
//!
//! `C^n` is the product over the `n`-simplices `(A_0 → … → A_n)` of the
//! nerve of the sharp category of `Hom(𝔞_{f_{n−1}} ⊗ … ⊗ 𝔞_{f_0},
//! M_{|u|}(A_0, A_n))`. Degenerate simplices are included.

mod arrow;
mod checks;
mod exact;

pub use arrow::{connecting_maps, regular_triangle, Triangle};
pub use checks::{
    censoring_check, ideal_support, localization_check, mayer_vietoris, sheaf_check, support_complex,
    support_sequence_check, CensoringVerdict, SupportComplex,
};
pub use exact::{
    long_exact_sequence, shifted, short_exact_degrees, DegreeVerdict, ExactnessReport, LesTable,
    LongExactSequence,
};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::bimod::Bimodule;
use crate::fincat::{nerve, SetBifunctor, Simplex};
use crate::mapgraded::{GradedCat, GradedFunctor};
use crate::qlinalg::{ComplexSegment, Matrix};
use crate::scalar::Scalar;

/// Sign convention of the differential.
///
/// `Standard`: `(dφ)(x_n, …, x_0) = x_n·φ(x_{n−1}, …, x_0)
/// + Σ_i (−1)^{n−i} φ(…, x_{i+1}x_i, …) + (−1)^{n+1} φ(x_n, …, x_1)·x_0`.
///
/// `Flipped` numbers the faces from the other end:
/// `(−1)^n x_n·φ(…) + Σ_i (−1)^i φ(…, x_{i+1}x_i, …) − φ(…)·x_0`, which is
/// `(−1)^n` times the standard `d^n`. Flipping the inner signs alone does not
/// give a complex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Convention {
    #[default]
    Standard,
    Flipped,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::Flipped => "flipped",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Convention::Standard => {
                "d(f)(x_n..x_0) = x_n f(..) + sum_i (-1)^(n-i) f(..x_{i+1}x_i..) + (-1)^(n+1) f(..) x_0"
            }
            Convention::Flipped => {
                "d(f)(x_n..x_0) = (-1)^n x_n f(..) + sum_i (-1)^i f(..x_{i+1}x_i..) - f(..) x_0"
            }
        }
    }

    /// `(−1)^n` under `Flipped`, `1` otherwise: the factor relating `d^n` to
    /// the standard one.
    pub fn twist(self, n: usize) -> i64 {
        match self {
            Convention::Flipped if n % 2 == 1 => -1,
            _ => 1,
        }
    }

    /// Signs `(left, inner_i, right)` of `d^n`.
    fn signs(self, n: usize) -> (i64, Vec<i64>, i64) {
        let e = self.twist(n);
        let pow = |k: usize| if k % 2 == 0 { 1 } else { -1 };
        let inner = (0..n).map(|i| e * pow(n - i)).collect();
        (e, inner, e * pow(n + 1))
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Convention::Standard),
            "flipped" => Ok(Convention::Flipped),
            other => Err(format!("unknown convention `{other}` (expected standard or flipped)")),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum HochschildError {
    #[error("coefficient bimodule does not live over the identity of the category")]
    CoefficientMismatch,
    #[error("truncation degree must be at least 1")]
    TruncationTooSmall,
    #[error("functor {0} is not subcartesian")]
    NotSubcartesian(String),
    #[error("functor {0} is not injective on sharp morphisms")]
    Not1Injective(String),
    #[error("not a cover: simplex {0} is not hit")]
    NotACover(String),
    #[error("cover check failed: {0}")]
    CoverCheckFailed(String),
    #[error("not an ideal-subcategory decomposition")]
    NotADecomposition,
    #[error("complexes do not match: {0}")]
    ShapeMismatch(String),
}

/// The factor of `C^n` over one simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Simplex of the sharp nerve.
    pub simplex: Simplex,
    /// Space of the coefficient bimodule over `|u|`.
    pub space: usize,
    /// Dimensions of the hom factors `f_0, …, f_{n−1}`.
    pub factors: Vec<usize>,
    /// Dimension of the coefficient space.
    pub target: usize,
    pub offset: usize,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.arity() * self.target
    }

    /// Number of basis tensors `e_{i_{n−1}} ⊗ … ⊗ e_{i_0}`.
    pub fn arity(&self) -> usize {
        self.factors.iter().product()
    }

    /// Strides of the flattened multi-index; `i_0` varies fastest, so the
    /// flat order is lexicographic in `(i_{n−1}, …, i_0)`.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.factors.len());
        let mut acc = 1;
        for d in &self.factors {
            s.push(acc);
            acc *= d;
        }
        s
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        self.strides().iter().zip(multi).map(|(s, i)| s * i).sum()
    }

    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|d| {
                let i = flat % d;
                flat /= d;
                i
            })
            .collect()
    }

    /// Coordinate of `(multi-index, target index)` in `C^n`.
    pub fn coord(&self, flat: usize, t: usize) -> usize {
        self.offset + flat * self.target + t
    }
}

#[derive(Clone, Debug)]
struct Level {
    blocks: Vec<Block>,
    lookup: HashMap<Simplex, usize>,
    dim: usize,
}

impl Level {
    fn find(&self, s: &Simplex) -> Option<&Block> {
        self.lookup.get(s).map(|&i| &self.blocks[i])
    }
}

/// `C^0, …, C^{N+1}` with differentials `d^0, …, d^N`, so that cohomology is
/// exact in every degree `≤ N`.
#[derive(Clone, Debug)]
pub struct HochschildComplex<F: Scalar> {
    pub source: Arc<GradedCat<F>>,
    pub coefficients: Arc<Bimodule<F>>,
    pub convention: Convention,
    top: usize,
    levels: Vec<Level>,
    segment: ComplexSegment<F>,
}

/// Hochschild dimensions `HH^0, …, HH^N`; `N` is the truncation degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HhDims {
    pub dims: Vec<usize>,
}

impl fmt::Display for HhDims {
    /// `HH: 2 1 1*`; the star marks the truncation degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HH:")?;
        for (i, d) in self.dims.iter().enumerate() {
            write!(f, " {d}")?;
            if i + 1 == self.dims.len() {
                write!(f, "*")?;
            }
        }
        Ok(())
    }
}

fn sign<F: Scalar>(s: i64) -> F {
    F::from_i64(s)
}

fn coefficients_fit<F: Scalar>(a: &Arc<GradedCat<F>>, m: &Bimodule<F>) -> bool {
    let same = |x: &Arc<GradedCat<F>>| Arc::ptr_eq(x, a) || x.structurally_equal(a);
    same(&m.left) && same(&m.right) && *m.carrier == SetBifunctor::identity(&a.base)
}

impl<F: Scalar> HochschildComplex<F> {
    /// `C(𝔞, M)` truncated at `top ≥ 1`.
    pub fn build(
        a: &Arc<GradedCat<F>>,
        m: &Arc<Bimodule<F>>,
        top: usize,
        convention: Convention,
    ) -> Result<Self, HochschildError> {
        if top == 0 {
            return Err(HochschildError::TruncationTooSmall);
        }
        if !coefficients_fit(a, m) {
            return Err(HochschildError::CoefficientMismatch);
        }
        let levels: Vec<Level> = (0..=top + 1).map(|n| level(a, m, n)).collect();
        let differentials = (0..=top)
            .map(|n| differential(a, m, &levels[n], &levels[n + 1], n, convention))
            .collect();
        Ok(HochschildComplex {
            source: a.clone(),
            coefficients: m.clone(),
            convention,
            top,
            levels,
            segment: ComplexSegment { differentials },
        })
    }

    /// `C(𝔞) = C(𝔞, 1_𝔞)`.
    pub fn plain(a: &Arc<GradedCat<F>>, top: usize, convention: Convention) -> Result<Self, HochschildError> {
        HochschildComplex::build(a, &Arc::new(Bimodule::identity(a)), top, convention)
    }

    /// The truncation degree `N`.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn dim(&self, n: usize) -> usize {
        self.levels[n].dim
    }

    /// `dim C^0, …, dim C^{N+1}`.
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    pub fn blocks(&self, n: usize) -> &[Block] {
        &self.levels[n].blocks
    }

    /// Block of a simplex, `None` when its factor of `C^n` is zero.
    pub fn block(&self, s: &Simplex) -> Option<&Block> {
        self.levels.get(s.degree())?.find(s)
    }

    /// `d^n: C^n → C^{n+1}` for `n ≤ N`.
    pub fn differential(&self, n: usize) -> &Matrix<F> {
        &self.segment.differentials[n]
    }

    pub fn segment(&self) -> &ComplexSegment<F> {
        &self.segment
    }

    /// First `n` with `d^{n+1} d^n ≠ 0`, as `(n, row, col)`.
    pub fn square_zero_failure(&self) -> Option<(usize, usize, usize)> {
        self.segment
            .differentials
            .windows(2)
            .enumerate()
            .find_map(|(n, w)| w[1].mul(&w[0]).first_nonzero().map(|(r, c, _)| (n, r, c)))
    }

    /// `HH^0, …, HH^N`.
    pub fn hh(&self) -> HhDims {
        HhDims {
            dims: self.segment.cohomology_dims().expect("Hochschild differentials compose to zero"),
        }
    }

    /// Human-readable name of a basis vector of `C^n`.
    pub fn basis_label(&self, n: usize, coord: usize) -> String {
        let level = &self.levels[n];
        let b = level
            .blocks
            .iter()
            .rev()
            .find(|b| b.offset <= coord)
            .expect("coordinate inside C^n");
        let local = coord - b.offset;
        let (flat, t) = (local / b.target, local % b.target);
        let sc = self.source.sharp_cat();
        let args: Vec<String> = b
            .digits(flat)
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &i)| self.source.elt_name(b.simplex.mors[k], i))
            .collect();
        format!(
            "{}[{}] -> {}",
            b.simplex.display(sc),
            args.join(", "),
            self.coefficients.basis(b.space)[t]
        )
    }
}

fn level<F: Scalar>(a: &GradedCat<F>, m: &Bimodule<F>, n: usize) -> Level {
    let sc = a.sharp_cat();
    let mut blocks = Vec::new();
    let mut lookup = HashMap::new();
    let mut offset = 0;
    for s in nerve(sc, n) {
        let factors: Vec<usize> = s.mors.iter().map(|&g| a.dim(g)).collect();
        let (u, a0, an) = a.key(s.composite(sc));
        let space = m.space_over(u, a0, an);
        let b = Block {
            simplex: s,
            space,
            factors,
            target: m.dim(space),
            offset,
        };
        if b.dim() == 0 {
            continue;
        }
        offset += b.dim();
        lookup.insert(b.simplex.clone(), blocks.len());
        blocks.push(b);
    }
    Level {
        blocks,
        lookup,
        dim: offset,
    }
}

/// Entries of an action matrix grouped by the acting basis element:
/// `groups[i]` holds `(row, t', value)`.
type Grouped<F> = Vec<Vec<(usize, usize, F)>>;

fn differential<F: Scalar>(
    a: &GradedCat<F>,
    m: &Bimodule<F>,
    src: &Level,
    dst: &Level,
    n: usize,
    convention: Convention,
) -> Matrix<F> {
    let sc = a.sharp_cat();
    let (sl, si, sr) = convention.signs(n);
    let (sl, sr): (F, F) = (sign(sl), sign(sr));
    let si: Vec<F> = si.into_iter().map(sign).collect();
    let mut trip = Vec::new();
    for tb in &dst.blocks {
        let mors = &tb.simplex.mors;
        let td = tb.target;
        let left = src
            .find(&Simplex {
                start: tb.simplex.start,
                mors: mors[..n].to_vec(),
            })
            .map(|b| {
                debug_assert_eq!(m.left_target(mors[n], b.space), tb.space);
                let mut g: Grouped<F> = vec![Vec::new(); a.dim(mors[n])];
                for (r, c, v) in m.left_matrix(mors[n], b.space).entries() {
                    g[c / b.target].push((r, c % b.target, v.clone()));
                }
                (b, g)
            });
        let right = src
            .find(&Simplex {
                start: sc.tgt(mors[0]),
                mors: mors[1..].to_vec(),
            })
            .map(|b| {
                debug_assert_eq!(m.right_target(b.space, mors[0]), tb.space);
                let dh = a.dim(mors[0]);
                let mut g: Grouped<F> = vec![Vec::new(); dh];
                for (r, c, v) in m.right_matrix(b.space, mors[0]).entries() {
                    g[c % dh].push((r, c / dh, v.clone()));
                }
                (b, g)
            });
        let inner: Vec<Option<&Block>> = (0..n)
            .map(|i| {
                let mut merged = mors[..i].to_vec();
                merged.push(sc.compose(mors[i + 1], mors[i]).expect("composable"));
                merged.extend_from_slice(&mors[i + 2..]);
                src.find(&Simplex {
                    start: tb.simplex.start,
                    mors: merged,
                })
            })
            .collect();
        for r in 0..tb.arity() {
            let j = tb.digits(r);
            if let Some((b, groups)) = &left {
                let rest = r % tb.strides()[n];
                for (t, t2, v) in &groups[j[n]] {
                    trip.push((tb.coord(r, *t), b.coord(rest, *t2), sl.clone() * v.clone()));
                }
            }
            for (i, b) in inner.iter().enumerate() {
                let Some(b) = b else { continue };
                for (p, c) in a.product_sparse(mors[i + 1], j[i + 1], mors[i], j[i]) {
                    let mut multi = j[..i].to_vec();
                    multi.push(*p);
                    multi.extend_from_slice(&j[i + 2..]);
                    let flat = b.flatten(&multi);
                    let v = si[i].clone() * c.clone();
                    for t in 0..td {
                        trip.push((tb.coord(r, t), b.coord(flat, t), v.clone()));
                    }
                }
            }
            if let Some((b, groups)) = &right {
                let rest = r / tb.factors[0];
                for (t, t2, v) in &groups[j[0]] {
                    trip.push((tb.coord(r, *t), b.coord(rest, *t2), sr.clone() * v.clone()));
                }
            }
        }
    }
    Matrix::from_triplets(dst.dim, src.dim, trip)
}

/// Components `C^n → D^n` of a map of complexes, for `n = 0, …, N + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<F: Scalar> {
    pub components: Vec<Matrix<F>>,
}

impl<F: Scalar> ChainMap<F> {
    pub fn component(&self, n: usize) -> &Matrix<F> {
        &self.components[n]
    }

    /// First degree `n` where `d_D^n f^n ≠ f^{n+1} d_C^n`, checking every
    /// degree both sides provide.
    pub fn commutation_failure(&self, src: &ComplexSegment<F>, tgt: &ComplexSegment<F>) -> Option<usize> {
        let top = src
            .differentials
            .len()
            .min(tgt.differentials.len())
            .min(self.components.len().saturating_sub(1));
        (0..top).find(|&n| {
            tgt.differentials[n].mul(&self.components[n]) != self.components[n + 1].mul(&src.differentials[n])
        })
    }

    pub fn after(&self, inner: &ChainMap<F>) -> ChainMap<F> {
        ChainMap {
            components: self.components.iter().zip(&inner.components).map(|(g, f)| g.mul(f)).collect(),
        }
    }

    /// `(f, g)`: the map into the direct sum.
    pub fn stack(parts: &[&ChainMap<F>]) -> ChainMap<F> {
        let len = parts.iter().map(|p| p.components.len()).min().unwrap_or(0);
        ChainMap {
            components: (0..len)
                .map(|n| {
                    let ms: Vec<&Matrix<F>> = parts.iter().map(|p| &p.components[n]).collect();
                    Matrix::vstack(ms[0].ncols(), &ms)
                })
                .collect(),
        }
    }

    /// `(f g)`: the map out of the direct sum.
    pub fn join(parts: &[&ChainMap<F>]) -> ChainMap<F> {
        let len = parts.iter().map(|p| p.components.len()).min().unwrap_or(0);
        ChainMap {
            components: (0..len)
                .map(|n| {
                    let ms: Vec<&Matrix<F>> = parts.iter().map(|p| &p.components[n]).collect();
                    Matrix::hstack(ms[0].nrows(), &ms)
                })
                .collect(),
        }
    }

    pub fn scaled(&self, s: &F) -> ChainMap<F> {
        ChainMap {
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }
}

/// Direct sum of complexes.
pub fn direct_sum<F: Scalar>(parts: &[&ComplexSegment<F>]) -> ComplexSegment<F> {
    let len = parts.iter().map(|p| p.differentials.len()).min().unwrap_or(0);
    ComplexSegment {
        differentials: (0..len)
            .map(|n| {
                let ds: Vec<&Matrix<F>> = parts.iter().map(|p| &p.differentials[n]).collect();
                Matrix::block_diag(&ds)
            })
            .collect(),
    }
}

/// Sparse columns of a matrix.
fn columns<F: Scalar>(m: &Matrix<F>) -> Vec<Vec<(usize, F)>> {
    let mut cols = vec![Vec::new(); m.ncols()];
    for (r, c, v) in m.entries() {
        cols[c].push((r, v.clone()));
    }
    cols
}

/// `Σ_I c_I e_I`: the tensor `F e_{j_{n−1}} ⊗ … ⊗ F e_{j_0}` expanded in the
/// target multi-index, given the columns of each factor map.
fn tensor_columns<F: Scalar>(factor_cols: &[&[(usize, F)]], target: &Block) -> Vec<(usize, F)> {
    let strides = target.strides();
    let mut acc: Vec<(usize, F)> = vec![(0, F::one())];
    for (k, col) in factor_cols.iter().enumerate() {
        let mut next = Vec::with_capacity(acc.len() * col.len());
        for (flat, c) in &acc {
            for (i, v) in col.iter() {
                next.push((flat + i * strides[k], c.clone() * v.clone()));
            }
        }
        acc = next;
    }
    acc
}

/// Shared pullback `φ ↦ post ∘ φ ∘ F^{⊗n}` from `ca` over `F.target` to `cb`
/// over `F.source`; `post(block)` maps the coefficient space of the image
/// block to that of `block`.
fn pull<F: Scalar>(
    f: &GradedFunctor<F>,
    ca: &HochschildComplex<F>,
    cb: &HochschildComplex<F>,
    post: impl Fn(&Block) -> Matrix<F>,
) -> ChainMap<F> {
    let sharp = f.sharp_functor();
    let hom_cols: Vec<Vec<Vec<(usize, F)>>> = f.homs().iter().map(columns).collect();
    let levels = ca.levels.len().min(cb.levels.len());
    let mut components = Vec::with_capacity(levels);
    for n in 0..levels {
        let mut trip = Vec::new();
        for bb in cb.blocks(n) {
            let Some(ba) = ca.levels[n].find(&bb.simplex.image(&sharp)) else { continue };
            let p = post(bb);
            let p_entries: Vec<(usize, usize, F)> = p.entries().map(|(r, c, v)| (r, c, v.clone())).collect();
            for r in 0..bb.arity() {
                let j = bb.digits(r);
                let cols: Vec<&[(usize, F)]> = bb
                    .simplex
                    .mors
                    .iter()
                    .zip(&j)
                    .map(|(g, &jj)| hom_cols[g.0][jj].as_slice())
                    .collect();
                for (flat, c) in tensor_columns(&cols, ba) {
                    for (t, t2, v) in &p_entries {
                        trip.push((bb.coord(r, *t), ba.coord(flat, *t2), c.clone() * v.clone()));
                    }
                }
            }
        }
        components.push(Matrix::from_triplets(cb.dim(n), ca.dim(n), trip));
    }
    ChainMap { components }
}

fn same_shape<F: Scalar>(x: &Arc<GradedCat<F>>, y: &Arc<GradedCat<F>>) -> bool {
    Arc::ptr_eq(x, y) || x.structurally_equal(y)
}

/// `F*_M: C(𝔞, M) → C(𝔟, F*M)` for `F: 𝔟 → 𝔞`:
/// `(F*φ)_{(v,B)} = φ_{(φv, FB)} ∘ F^{⊗n}`. `cb` must be built on the
/// restricted bimodule (same coefficient spaces).
pub fn restriction_map<F: Scalar>(
    f: &GradedFunctor<F>,
    ca: &HochschildComplex<F>,
    cb: &HochschildComplex<F>,
) -> Result<ChainMap<F>, HochschildError> {
    check_ends(f, ca, cb)?;
    let sharp = f.sharp_functor();
    for n in 0..cb.levels.len().min(ca.levels.len()) {
        for bb in cb.blocks(n) {
            let (u, a0, an) = ca.source.key(bb.simplex.image(&sharp).composite(ca.source.sharp_cat()));
            let k = ca.coefficients.space_over(u, a0, an);
            if ca.coefficients.dim(k) != bb.target {
                return Err(HochschildError::CoefficientMismatch);
            }
        }
    }
    Ok(pull(f, ca, cb, |b| Matrix::identity(b.target)))
}

/// The coefficient-free `F*: C(𝔞) → C(𝔟)`, `φ ↦ F^{−1} ∘ φ ∘ F^{⊗n}`, for a
/// subcartesian `F`.
pub fn plain_restriction<F: Scalar>(
    f: &GradedFunctor<F>,
    ca: &HochschildComplex<F>,
    cb: &HochschildComplex<F>,
) -> Result<ChainMap<F>, HochschildError> {
    check_ends(f, ca, cb)?;
    if !f.is_subcartesian() {
        return Err(HochschildError::NotSubcartesian(functor_label(f)));
    }
    let identity = |c: &HochschildComplex<F>| c.coefficients.structurally_equal(&Bimodule::identity(&c.source));
    if !identity(ca) || !identity(cb) {
        return Err(HochschildError::CoefficientMismatch);
    }
    let bsc = f.source.sharp_cat().clone();
    let inverses: Vec<Matrix<F>> = f
        .homs()
        .iter()
        .map(|h| h.inverse().expect("subcartesian hom maps are invertible"))
        .collect();
    Ok(pull(f, ca, cb, |b| inverses[b.simplex.composite(&bsc).0].clone()))
}

/// `objects of source -> objects of target`, for error messages.
pub(crate) fn functor_label<F: Scalar>(f: &GradedFunctor<F>) -> String {
    let names = |c: &GradedCat<F>| (0..c.num_objects()).map(|i| c.obj_name(i)).collect::<Vec<_>>().join(",");
    format!("{{{}}} -> {{{}}}", names(&f.source), names(&f.target))
}

fn check_ends<F: Scalar>(
    f: &GradedFunctor<F>,
    ca: &HochschildComplex<F>,
    cb: &HochschildComplex<F>,
) -> Result<(), HochschildError> {
    if !same_shape(&f.target, &ca.source) || !same_shape(&f.source, &cb.source) {
        return Err(HochschildError::ShapeMismatch(
            "functor ends differ from the complexes' categories".into(),
        ));
    }
    Ok(())
}

/// `C(𝔞, h): C(𝔞, M) → C(𝔞, N)` for a bimodule map given by one matrix per
/// space (`M` and `N` share their space list).
pub fn coefficient_map<F: Scalar>(
    ca: &HochschildComplex<F>,
    cb: &HochschildComplex<F>,
    h: &[Matrix<F>],
) -> Result<ChainMap<F>, HochschildError> {
    if !same_shape(&ca.source, &cb.source)
        || ca.coefficients.keys() != cb.coefficients.keys()
        || h.len() != ca.coefficients.num_spaces()
    {
        return Err(HochschildError::ShapeMismatch("coefficient map between unrelated complexes".into()));
    }
    let levels = ca.levels.len().min(cb.levels.len());
    let mut components = Vec::with_capacity(levels);
    for n in 0..levels {
        let mut trip = Vec::new();
        for bb in cb.blocks(n) {
            let Some(ba) = ca.levels[n].find(&bb.simplex) else { continue };
            let entries: Vec<(usize, usize, F)> = h[bb.space].entries().map(|(r, c, v)| (r, c, v.clone())).collect();
            for r in 0..bb.arity() {
                for (t, t2, v) in &entries {
                    trip.push((bb.coord(r, *t), ba.coord(r, *t2), v.clone()));
                }
            }
        }
        components.push(Matrix::from_triplets(cb.dim(n), ca.dim(n), trip));
    }
    Ok(ChainMap { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_n_injective, is_n_surjective, FinCat, Functor, Obj};
    use crate::bimod::{arrow_category, restrict_bimodule};
    use crate::mapgraded::{restrict, sharp};
    use crate::Q;

    fn vposet() -> Arc<FinCat> {
        Arc::new(FinCat::poset(&["s", "t0", "t1"], &[("s", "t0"), ("s", "t1")]).unwrap())
    }

    fn sub(p: &Arc<FinCat>, names: &[&str]) -> Functor {
        let ids: Vec<Obj> = names.iter().map(|n| p.find_object(n).unwrap()).collect();
        let (c, o, m) = p.full_subcategory(&ids);
        Functor::from_sub(Arc::new(c), p.clone(), o, m)
    }

    fn hh(a: GradedCat<Q>, top: usize) -> Vec<usize> {
        let c = HochschildComplex::plain(&Arc::new(a), top, Convention::Standard).unwrap();
        assert_eq!(c.square_zero_failure(), None);
        c.hh().dims
    }

    /// Independent dense elimination over ℚ.
    fn dense_rank(m: &Matrix<Q>) -> usize {
        let mut rows = m.to_dense();
        let mut rank = 0;
        for c in 0..m.ncols() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != Q::from_i64(0)) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank][c].clone();
            for r in 0..rows.len() {
                if r != rank && rows[r][c] != Q::from_i64(0) {
                    let f = rows[r][c].clone() / pivot.clone();
                    for k in 0..m.ncols() {
                        let v = rows[rank][k].clone() * f.clone();
                        rows[r][k] = rows[r][k].clone() - v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn hh_oracle(c: &HochschildComplex<Q>) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=c.top()).map(|n| dense_rank(c.differential(n))).collect();
        (0..=c.top())
            .map(|n| c.dim(n) - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] })
            .collect()
    }

    #[test]
    fn ground_field() {
        let c = HochschildComplex::<Q>::plain(&Arc::new(GradedCat::ground()), 3, Convention::Standard).unwrap();
        assert_eq!(c.dims(), vec![1, 1, 1, 1, 1]);
        assert_eq!(c.hh().dims, vec![1, 0, 0, 0]);
        assert_eq!(hh_oracle(&c), vec![1, 0, 0, 0]);
        assert_eq!(c.hh().to_string(), "HH: 1 0 0 0*");
    }

    #[test]
    fn dual_numbers() {
        let a = Arc::new(GradedCat::<Q>::truncated_polynomial(2));
        let c = HochschildComplex::plain(&a, 2, Convention::Standard).unwrap();
        assert_eq!(c.dims(), vec![2, 4, 8, 16]);
        assert_eq!(c.hh().dims, vec![2, 1, 1]);
        assert_eq!(hh_oracle(&c), vec![2, 1, 1]);
        let flipped = HochschildComplex::plain(&a, 2, Convention::Flipped).unwrap();
        assert_eq!(flipped.square_zero_failure(), None);
        assert_eq!(flipped.hh().dims, vec![2, 1, 1]);
    }

    #[test]
    fn poset_algebras() {
        let p = vposet();
        let c = HochschildComplex::<Q>::plain(&Arc::new(GradedCat::free(&p)), 3, Convention::Standard).unwrap();
        // dim C^n = |N_n|
        let counts: Vec<usize> = (0..=4).map(|n| crate::fincat::nerve_count(&p, n)).collect();
        assert_eq!(c.dims(), counts);
        assert_eq!(c.hh().dims, vec![1, 0, 0, 0]);
        assert_eq!(hh_oracle(&c), vec![1, 0, 0, 0]);
        // the boundary of a square: a circle
        let sq = Arc::new(
            FinCat::free_on_dag(&["a", "b", "c", "d"], &[("f", "a", "b"), ("g", "a", "c"), ("h", "b", "d"), ("k", "c", "d")])
                .unwrap(),
        );
        assert_eq!(hh(GradedCat::free(&sq), 2), vec![1, 1, 0]);
    }

    #[test]
    fn triangular_matrices() {
        let k: Arc<GradedCat<Q>> = Arc::new(GradedCat::ground());
        let t2 = arrow_category(&Bimodule::identity(&k)).cat;
        let c = HochschildComplex::plain(&t2, 2, Convention::Standard).unwrap();
        assert_eq!(c.hh().dims, vec![1, 0, 0]);
        assert_eq!(hh_oracle(&c), vec![1, 0, 0]);
    }

    #[test]
    fn standard_and_trivial_grading_agree() {
        let lam: GradedCat<Q> = GradedCat::truncated_polynomial(3);
        let p = vposet();
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (s, _) = sharp(&kp);
        assert_eq!(hh(lam, 2), vec![3, 2, 2]);
        let c1 = HochschildComplex::plain(&kp, 2, Convention::Standard).unwrap();
        let c2 = HochschildComplex::plain(&s, 2, Convention::Standard).unwrap();
        assert_eq!(c1.dims(), c2.dims());
        assert_eq!(c1.hh(), c2.hh());
    }

    #[test]
    fn restriction_along_sharp_counit_is_bijective() {
        let p = vposet();
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (s, counit) = sharp(&kp);
        let ca = HochschildComplex::plain(&kp, 2, Convention::Standard).unwrap();
        let cb = HochschildComplex::plain(&s, 2, Convention::Standard).unwrap();
        let r = plain_restriction(&counit, &ca, &cb).unwrap();
        assert!(r.components.iter().all(Matrix::is_invertible));
        assert_eq!(r.commutation_failure(ca.segment(), cb.segment()), None);
    }

    #[test]
    fn restriction_to_a_point_is_surjective() {
        let a2 = Arc::new(FinCat::chain(1));
        let ka: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&a2));
        let inc = sub(&a2, &["0"]);
        let (b, delta) = restrict(&ka, &inc);
        let one = Arc::new(Bimodule::identity(&ka));
        let ca = HochschildComplex::build(&ka, &one, 3, Convention::Standard).unwrap();
        let pulled = Arc::new(restrict_bimodule(&delta, &one).unwrap());
        let cb = HochschildComplex::build(&b, &pulled, 3, Convention::Standard).unwrap();
        let r = restriction_map(&delta, &ca, &cb).unwrap();
        assert!(is_n_injective(&delta.sharp_functor(), 3));
        assert!(!is_n_surjective(&delta.sharp_functor(), 0));
        assert!(r.components.iter().all(Matrix::is_surjective));
        assert!(!r.components[0].is_injective());
        assert_eq!(r.commutation_failure(ca.segment(), cb.segment()), None);
        let id = GradedFunctor::identity(&ka);
        let ri = restriction_map(&id, &ca, &ca).unwrap();
        assert!(ri.components.iter().enumerate().all(|(n, m)| *m == Matrix::identity(ca.dim(n))));
    }

    #[test]
    fn restriction_is_functorial() {
        let p = vposet();
        let kp: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&p));
        let (b, d1) = restrict(&kp, &sub(&p, &["s", "t0"]));
        let sb = b.base.clone();
        let (c, o, m) = sb.full_subcategory(&[Obj(0)]);
        let (cc, d2) = restrict(&b, &Functor::from_sub(Arc::new(c), sb.clone(), o, m));
        let ca = HochschildComplex::plain(&kp, 2, Convention::Standard).unwrap();
        let cbc = HochschildComplex::plain(&b, 2, Convention::Standard).unwrap();
        let ccc = HochschildComplex::plain(&cc, 2, Convention::Standard).unwrap();
        let r1 = plain_restriction(&d1, &ca, &cbc).unwrap();
        let r2 = plain_restriction(&d2, &cbc, &ccc).unwrap();
        let r12 = plain_restriction(&d1.after(&d2), &ca, &ccc).unwrap();
        assert_eq!(r2.after(&r1), r12);
    }

    #[test]
    fn coefficient_mismatch() {
        let a: Arc<GradedCat<Q>> = Arc::new(GradedCat::truncated_polynomial(2));
        let b: Arc<GradedCat<Q>> = Arc::new(GradedCat::free(&vposet()));
        let m = Arc::new(Bimodule::identity(&b));
        assert_eq!(
            HochschildComplex::build(&a, &m, 2, Convention::Standard).unwrap_err(),
            HochschildError::CoefficientMismatch
        );
        assert_eq!(
            HochschildComplex::plain(&a, 0, Convention::Standard).unwrap_err(),
            HochschildError::TruncationTooSmall
        );
    }

    #[test]
    fn basis_labels() {
        let a = Arc::new(GradedCat::<Q>::truncated_polynomial(2));
        let c = HochschildComplex::plain(&a, 1, Convention::Standard).unwrap();
        assert_eq!(c.basis_label(1, 0), c.basis_label(1, 0));
        assert!(c.basis_label(1, 3).contains("->"));
    }
}
