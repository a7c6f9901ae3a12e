//! Exact linear algebra over a [`Scalar`] field.
//!
//! Matrices are stored as sorted sparse triplets. Ranks use fraction-free
//! Bareiss elimination; bases (kernels, images, quotients, solutions) come
//! from a reduced row echelon form with the deterministic pivot rule "first
//! row whose leading entry sits in the leftmost remaining column".

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

type Row<F> = Vec<(usize, F)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("not a complex: d^{next} * d^{degree} has entry ({row}, {col}) = {value}")]
    NotAComplex {
        degree: usize,
        next: usize,
        row: usize,
        col: usize,
        value: String,
    },
    #[error("dimension mismatch at map {index}: expected {expected} columns, found {found}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
}

/// Sparse matrix with exact entries. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), F>,
}

impl<F: Scalar> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), F::one());
        }
        m
    }

    /// Builds a matrix from dense rows; `cols` is needed when `data` is empty.
    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<F>]) -> Self {
        assert_eq!(data.len(), rows, "row count");
        let mut m = Self::zeros(rows, cols);
        for (r, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "column count in row {r}");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[&[i64]]) -> Self {
        let dense: Vec<Vec<F>> = data
            .iter()
            .map(|r| r.iter().map(|&v| F::from_i64(v)).collect())
            .collect();
        Self::from_dense(rows, cols, &dense)
    }

    /// Sums duplicate triplets.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, F)>,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (r, c, v) in triplets {
            m.add_at(r, c, v);
        }
        m
    }

    /// Column vector.
    pub fn column_vector(entries: &[F]) -> Self {
        let mut m = Self::zeros(entries.len(), 1);
        for (i, v) in entries.iter().enumerate() {
            m.set(i, 0, v.clone());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(F::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: F) {
        if v.is_zero() {
            return;
        }
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        let sum = self.get(r, c) + v;
        self.set(r, c, sum);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// First stored entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, F)> {
        self.entries
            .iter()
            .next()
            .map(|(&(r, c), v)| (r, c, v.clone()))
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut out = vec![vec![F::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "product of {}x{} and {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let other_rows = other.row_vectors();
        let mut acc: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            for (c, b) in &other_rows[k] {
                let e = acc.entry((r, *c)).or_insert_with(F::zero);
                *e = e.clone() + a.clone() * b.clone();
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Matrix {
            rows: self.rows,
            cols: other.cols,
            entries: acc,
        }
    }

    /// `self · x` for a dense vector `x`.
    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![F::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                out[r] = out[r].clone() + v.clone() * x[c].clone();
            }
        }
        out
    }

    /// Column `c` as a dense vector.
    pub fn column(&self, c: usize) -> Vec<F> {
        let mut out = vec![F::zero(); self.rows];
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    /// Matrix whose columns are the given dense vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        let mut out = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    out.entries.insert((r, c), v.clone());
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_at(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&k, v)| (k, v.clone() * s.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    /// Horizontal concatenation; all parts must have `rows` rows.
    pub fn hstack(rows: usize, parts: &[&Self]) -> Self {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows);
            for (r, c, v) in p.entries() {
                out.entries.insert((r, c + off), v.clone());
            }
            off += p.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must have `cols` columns.
    pub fn vstack(cols: usize, parts: &[&Self]) -> Self {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.cols, cols);
            for (r, c, v) in p.entries() {
                out.entries.insert((r + off, c), v.clone());
            }
            off += p.rows;
        }
        out
    }

    pub fn block_diag(parts: &[&Self]) -> Self {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            for (r, c, v) in p.entries() {
                out.entries.insert((r + ro, c + co), v.clone());
            }
            ro += p.rows;
            co += p.cols;
        }
        out
    }

    /// Kronecker product; index `(i, j)` of `a ⊗ b` is `i * b.rows + j`.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let mut out = Self::zeros(a.rows * b.rows, a.cols * b.cols);
        for (ra, ca, va) in a.entries() {
            for (rb, cb, vb) in b.entries() {
                out.entries.insert(
                    (ra * b.rows + rb, ca * b.cols + cb),
                    va.clone() * vb.clone(),
                );
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let pos: BTreeMap<usize, Vec<usize>> = idx.iter().enumerate().fold(
            BTreeMap::new(),
            |mut m, (new, &old)| {
                m.entry(old).or_insert_with(Vec::new).push(new);
                m
            },
        );
        let mut out = Self::zeros(idx.len(), self.cols);
        for (r, c, v) in self.entries() {
            if let Some(news) = pos.get(&r) {
                for &n in news {
                    out.entries.insert((n, c), v.clone());
                }
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        self.transpose().select_rows(idx).transpose()
    }

    fn row_vectors(&self) -> Vec<Row<F>> {
        let mut rows: Vec<Row<F>> = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }

    fn from_rows(rows: usize, cols: usize, data: Vec<Row<F>>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (r, row) in data.into_iter().enumerate() {
            for (c, v) in row {
                if !v.is_zero() {
                    m.entries.insert((r, c), v);
                }
            }
        }
        m
    }

    /// Rank by fraction-free Bareiss elimination.
    ///
    /// Rows untouched by a pivot step carry a lazy scale factor instead of
    /// being rewritten, so each step only visits rows with a nonzero entry in
    /// the pivot column.
    pub fn rank(&self) -> usize {
        let mut active: Vec<(F, Row<F>)> = self
            .row_vectors()
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| (F::one(), r))
            .collect();
        let mut prev = F::one();
        let mut rank = 0;
        while !active.is_empty() {
            let lead = active.iter().map(|(_, r)| r[0].0).min().unwrap();
            let p = active.iter().position(|(_, r)| r[0].0 == lead).unwrap();
            let (sp, prow) = active.remove(p);
            let piv = sp.clone() * prow[0].1.clone();
            for (s, r) in active.iter_mut() {
                if r[0].0 == lead {
                    let a = s.clone() * r[0].1.clone();
                    let x = piv.clone() * s.clone() / prev.clone();
                    let y = -(a * sp.clone() / prev.clone());
                    *r = combine(&r[1..], &x, &prow[1..], &y);
                    *s = F::one();
                } else {
                    *s = s.clone() * piv.clone() / prev.clone();
                }
            }
            active.retain(|(_, r)| !r.is_empty());
            prev = piv;
            rank += 1;
        }
        rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn rref(&self) -> Rref<F> {
        Rref::of_rows(self.row_vectors(), self.cols)
    }

    /// Columns form a basis of the kernel (one column per free variable).
    pub fn kernel_basis(&self) -> Self {
        let rref = self.rref();
        let free = rref.free_columns();
        let mut k = Self::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.entries.insert((f, j), F::one());
            for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
                if let Ok(pos) = row.binary_search_by_key(&f, |e| e.0) {
                    k.set(p, j, -row[pos].1.clone());
                }
            }
        }
        k
    }

    /// Basis of the column space chosen among the original columns.
    pub fn image_basis(&self) -> Self {
        let rref = self.rref();
        self.select_cols(&rref.pivots)
    }

    /// Some `X` with `self * X = b`, or `None` when inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows);
        let aug = Self::hstack(self.rows, &[self, b]);
        let rref = aug.rref();
        let mut x = Self::zeros(self.cols, b.cols);
        for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
            if p >= self.cols {
                return None;
            }
            for (c, v) in row {
                if *c >= self.cols {
                    x.set(p, c - self.cols, v.clone());
                }
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols || self.rank() != self.rows {
            return None;
        }
        self.solve(&Self::identity(self.rows))
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

fn combine<F: Scalar>(a: &[(usize, F)], x: &F, b: &[(usize, F)], y: &F) -> Row<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (c, v) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            i += 1;
            (a[i - 1].0, a[i - 1].1.clone() * x.clone())
        } else if i == a.len() || b[j].0 < a[i].0 {
            j += 1;
            (b[j - 1].0, b[j - 1].1.clone() * y.clone())
        } else {
            i += 1;
            j += 1;
            (
                a[i - 1].0,
                a[i - 1].1.clone() * x.clone() + b[j - 1].1.clone() * y.clone(),
            )
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Reduced row echelon form: pivot rows are normalized and every pivot
/// column is zero outside its pivot row.
#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub cols: usize,
    pub pivots: Vec<usize>,
    rows: Vec<Row<F>>,
}

impl<F: Scalar> Rref<F> {
    fn of_rows(rows: Vec<Row<F>>, cols: usize) -> Self {
        let mut active: Vec<Row<F>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
        let mut done: Vec<Row<F>> = Vec::new();
        let mut pivots = Vec::new();
        while !active.is_empty() {
            let lead = active.iter().map(|r| r[0].0).min().unwrap();
            let p = active.iter().position(|r| r[0].0 == lead).unwrap();
            let prow = active.remove(p);
            let inv = prow[0].1.inv();
            let prow: Row<F> = prow
                .into_iter()
                .map(|(c, v)| (c, v * inv.clone()))
                .collect();
            for r in active.iter_mut() {
                if r[0].0 == lead {
                    let y = -r[0].1.clone();
                    *r = combine(&r[1..], &F::one(), &prow[1..], &y);
                }
            }
            active.retain(|r| !r.is_empty());
            done.push(prow);
            pivots.push(lead);
        }
        for i in (0..done.len()).rev() {
            let p = pivots[i];
            let (head, tail) = done.split_at_mut(i);
            let prow = &tail[0];
            for r in head.iter_mut() {
                if let Ok(pos) = r.binary_search_by_key(&p, |e| e.0) {
                    let y = -r[pos].1.clone();
                    *r = combine(r, &F::one(), prow, &y);
                }
            }
        }
        Rref {
            cols,
            pivots,
            rows: done,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    pub fn to_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(self.rows.len(), self.cols, self.rows.clone())
    }
}

/// Quotient `k^n / im(R)` presented by the standard basis vectors outside the
/// pivot columns of the row-reduced relations.
#[derive(Clone, Debug)]
pub struct Quotient<F: Scalar> {
    pub ambient: usize,
    /// Ambient coordinates whose classes form the chosen basis.
    pub complement: Vec<usize>,
    /// `dim × ambient` matrix sending a vector to its class.
    pub projection: Matrix<F>,
}

impl<F: Scalar> Quotient<F> {
    /// `relations` has one column per relation, `ambient` rows.
    pub fn new(relations: &Matrix<F>) -> Self {
        let n = relations.nrows();
        let rref = relations.transpose().rref();
        let complement = rref.free_columns();
        let mut slot = vec![usize::MAX; n];
        for (i, &c) in complement.iter().enumerate() {
            slot[c] = i;
        }
        let mut proj = Matrix::zeros(complement.len(), n);
        for (i, &c) in complement.iter().enumerate() {
            proj.set(i, c, F::one());
        }
        for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
            for (c, v) in row {
                if *c != p {
                    proj.set(slot[*c], p, -v.clone());
                }
            }
        }
        Quotient {
            ambient: n,
            complement,
            projection: proj,
        }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// `ambient × dim` matrix sending a basis class to its chosen lift.
    pub fn section(&self) -> Matrix<F> {
        let mut s = Matrix::zeros(self.ambient, self.dim());
        for (i, &c) in self.complement.iter().enumerate() {
            s.set(c, i, F::one());
        }
        s
    }
}

/// A subquotient `Z / B` of `k^n` with chosen representative cocycles.
#[derive(Clone, Debug)]
pub struct Subquotient<F: Scalar> {
    pub ambient: usize,
    /// Columns: basis of `B` followed by representatives spanning `Z / B`.
    frame: Matrix<F>,
    boundary_dim: usize,
}

impl<F: Scalar> Subquotient<F> {
    /// Cohomology at a term with incoming `d_in` (`n` rows) and outgoing
    /// `d_out` (`n` columns); missing maps are zero.
    pub fn cohomology(n: usize, d_in: Option<&Matrix<F>>, d_out: Option<&Matrix<F>>) -> Self {
        let b = match d_in {
            Some(d) => d.image_basis(),
            None => Matrix::zeros(n, 0),
        };
        let z = match d_out {
            Some(d) => d.kernel_basis(),
            None => Matrix::identity(n),
        };
        let both = Matrix::hstack(n, &[&b, &z]);
        let rref = both.rref();
        let reps: Vec<usize> = rref
            .pivots
            .iter()
            .filter(|&&p| p >= b.ncols())
            .map(|&p| p - b.ncols())
            .collect();
        let reps = z.select_cols(&reps);
        Subquotient {
            ambient: n,
            boundary_dim: b.ncols(),
            frame: Matrix::hstack(n, &[&b, &reps]),
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols() - self.boundary_dim
    }

    /// Representative cocycles as columns.
    pub fn representatives(&self) -> Matrix<F> {
        let idx: Vec<usize> = (self.boundary_dim..self.frame.ncols()).collect();
        self.frame.select_cols(&idx)
    }

    /// Classes of the columns of `z`, or `None` if some column is not a cocycle.
    pub fn classes(&self, z: &Matrix<F>) -> Option<Matrix<F>> {
        let x = self.frame.solve(z)?;
        let idx: Vec<usize> = (self.boundary_dim..self.frame.ncols()).collect();
        Some(x.select_rows(&idx))
    }

    /// Matrix of the map induced by `f` from `self` to `target`.
    pub fn induced(&self, f: &Matrix<F>, target: &Subquotient<F>) -> Option<Matrix<F>> {
        target.classes(&f.mul(&self.representatives()))
    }
}

/// Finite segment `C^0 → C^1 → … → C^{k+1}` of a cochain complex given by
/// its differentials `d^0, …, d^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexSegment<F: Scalar> {
    pub differentials: Vec<Matrix<F>>,
}

impl<F: Scalar> ComplexSegment<F> {
    pub fn new(differentials: Vec<Matrix<F>>) -> Result<Self, LinalgError> {
        let seg = ComplexSegment { differentials };
        seg.check()?;
        Ok(seg)
    }

    /// Dimensions of `C^0, …, C^{k+1}`.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.differentials.iter().map(|m| m.ncols()).collect();
        if let Some(last) = self.differentials.last() {
            d.push(last.nrows());
        }
        d
    }

    pub fn check(&self) -> Result<(), LinalgError> {
        for (i, w) in self.differentials.windows(2).enumerate() {
            if w[1].ncols() != w[0].nrows() {
                return Err(LinalgError::DimensionMismatch {
                    index: i + 1,
                    expected: w[0].nrows(),
                    found: w[1].ncols(),
                });
            }
            if let Some((row, col, v)) = w[1].mul(&w[0]).first_nonzero() {
                return Err(LinalgError::NotAComplex {
                    degree: i,
                    next: i + 1,
                    row,
                    col,
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `dim H^i = nullity(d^i) − rank(d^{i−1})` for every domain `C^i`.
    pub fn cohomology_dims(&self) -> Result<Vec<usize>, LinalgError> {
        self.check()?;
        let ranks: Vec<usize> = self.differentials.iter().map(|d| d.rank()).collect();
        Ok(self
            .differentials
            .iter()
            .enumerate()
            .map(|(i, d)| d.ncols() - ranks[i] - if i == 0 { 0 } else { ranks[i - 1] })
            .collect())
    }

    /// Cohomology at `C^i` for `i` a domain degree.
    pub fn cohomology(&self, i: usize) -> Subquotient<F> {
        let d_out = &self.differentials[i];
        let d_in = if i == 0 {
            None
        } else {
            Some(&self.differentials[i - 1])
        };
        Subquotient::cohomology(d_out.ncols(), d_in, Some(d_out))
    }
}

/// Which ends of a sequence must also be exact against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flanks {
    /// Demand injectivity of the first map.
    pub left: bool,
    /// Demand surjectivity of the last map.
    pub right: bool,
}

impl Flanks {
    pub const OPEN: Flanks = Flanks {
        left: false,
        right: false,
    };
    pub const LEFT: Flanks = Flanks {
        left: true,
        right: false,
    };
    pub const SHORT: Flanks = Flanks {
        left: true,
        right: true,
    };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessFailure {
    /// `maps[position] * maps[position - 1]` is nonzero.
    NonzeroComposite { position: usize },
    /// The image at term `position` is strictly smaller than the kernel.
    Homology {
        position: usize,
        image_rank: usize,
        kernel_dim: usize,
    },
    NotInjective { rank: usize, dim: usize },
    NotSurjective { rank: usize, dim: usize },
}

impl fmt::Display for ExactnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessFailure::NonzeroComposite { position } => {
                write!(f, "composite through term {position} is nonzero")
            }
            ExactnessFailure::Homology {
                position,
                image_rank,
                kernel_dim,
            } => write!(
                f,
                "term {position}: image rank {image_rank} < kernel dimension {kernel_dim}"
            ),
            ExactnessFailure::NotInjective { rank, dim } => {
                write!(f, "first map not injective (rank {rank} of {dim})")
            }
            ExactnessFailure::NotSurjective { rank, dim } => {
                write!(f, "last map not surjective (rank {rank} of {dim})")
            }
        }
    }
}

/// Verdict for a sequence `V_0 → V_1 → … → V_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exactness {
    pub failures: Vec<ExactnessFailure>,
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks exactness at every interior term of the composable chain `maps`
/// (`maps[i]: V_i → V_{i+1}`), plus the flanks requested.
pub fn is_exact_sequence<F: Scalar>(
    maps: &[Matrix<F>],
    flanks: Flanks,
) -> Result<Exactness, LinalgError> {
    for (i, w) in maps.windows(2).enumerate() {
        if w[1].ncols() != w[0].nrows() {
            return Err(LinalgError::DimensionMismatch {
                index: i + 1,
                expected: w[0].nrows(),
                found: w[1].ncols(),
            });
        }
    }
    let ranks: Vec<usize> = maps.iter().map(|m| m.rank()).collect();
    let mut failures = Vec::new();
    if let (true, Some(first)) = (flanks.left, maps.first()) {
        if ranks[0] != first.ncols() {
            failures.push(ExactnessFailure::NotInjective {
                rank: ranks[0],
                dim: first.ncols(),
            });
        }
    }
    for i in 1..maps.len() {
        if !maps[i].mul(&maps[i - 1]).is_zero() {
            failures.push(ExactnessFailure::NonzeroComposite { position: i });
            continue;
        }
        let kernel_dim = maps[i].ncols() - ranks[i];
        if ranks[i - 1] != kernel_dim {
            failures.push(ExactnessFailure::Homology {
                position: i,
                image_rank: ranks[i - 1],
                kernel_dim,
            });
        }
    }
    if let (true, Some(last)) = (flanks.right, maps.last()) {
        let r = ranks[maps.len() - 1];
        if r != last.nrows() {
            failures.push(ExactnessFailure::NotSurjective {
                rank: r,
                dim: last.nrows(),
            });
        }
    }
    Ok(Exactness { failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn m(rows: usize, cols: usize, data: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows, cols, data)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(Matrix::<Q>::zeros(3, 3).rank(), 0);
        assert_eq!(Matrix::<Q>::identity(5).rank(), 5);
        assert_eq!(m(2, 2, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(2, 3, &[&[1, 2, 3], &[2, 4, 7]]);
        let k = a.kernel_basis();
        assert_eq!(k.ncols(), 1);
        assert!(a.mul(&k).is_zero());
        let b = m(2, 1, &[&[1], &[3]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);
        let inconsistent = m(2, 2, &[&[1, 1], &[1, 1]]);
        assert!(inconsistent.solve(&m(2, 1, &[&[1], &[2]])).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(3, 3, &[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert!(m(2, 2, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn quotient_projection_kills_relations() {
        let rel = m(3, 1, &[&[1], &[-1], &[0]]);
        let q = Quotient::new(&rel);
        assert_eq!(q.dim(), 2);
        assert!(q.projection.mul(&rel).is_zero());
        assert_eq!(q.projection.mul(&q.section()), Matrix::identity(2));
    }

    #[test]
    fn zero_differentials_keep_everything() {
        let seg = ComplexSegment::new(vec![
            Matrix::<Q>::zeros(4, 2),
            Matrix::zeros(8, 4),
            Matrix::zeros(0, 8),
        ])
        .unwrap();
        assert_eq!(seg.cohomology_dims().unwrap(), vec![2, 4, 8]);
    }

    #[test]
    fn identity_then_zero_is_acyclic() {
        let seg = ComplexSegment::new(vec![Matrix::<Q>::identity(1), Matrix::zeros(0, 1)]).unwrap();
        assert_eq!(seg.cohomology_dims().unwrap(), vec![0, 0]);
    }

    #[test]
    fn not_a_complex_reports_entry() {
        let err = ComplexSegment::new(vec![Matrix::<Q>::identity(1), Matrix::identity(1)])
            .unwrap_err();
        assert!(matches!(err, LinalgError::NotAComplex { degree: 0, row: 0, col: 0, .. }));
    }

    #[test]
    fn exact_sequence_examples() {
        let id = Matrix::<Q>::identity(3);
        assert!(is_exact_sequence(&[id], Flanks::SHORT).unwrap().is_exact());
        let inc = m(2, 1, &[&[1], &[1]]);
        let proj = m(1, 2, &[&[1, -1]]);
        assert!(is_exact_sequence(&[inc, proj], Flanks::SHORT).unwrap().is_exact());
        let inc = m(2, 1, &[&[1], &[0]]);
        let v = is_exact_sequence(&[inc], Flanks::SHORT).unwrap();
        assert_eq!(
            v.failures,
            vec![ExactnessFailure::NotSurjective { rank: 1, dim: 2 }]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let a = Matrix::<Q>::zeros(2, 1);
        let b = Matrix::<Q>::zeros(1, 3);
        assert!(matches!(
            is_exact_sequence(&[a, b], Flanks::OPEN),
            Err(LinalgError::DimensionMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn subquotient_classes() {
        // C^0 = Q -> C^1 = Q^2 -> C^2 = Q, d0 = (1,1)^T, d1 = (1,-1)
        let d0 = m(2, 1, &[&[1], &[1]]);
        let d1 = m(1, 2, &[&[1, -1]]);
        let h = Subquotient::cohomology(2, Some(&d0), Some(&d1));
        assert_eq!(h.dim(), 0);
        let d1 = Matrix::<Q>::zeros(1, 2);
        let h = Subquotient::cohomology(2, Some(&d0), Some(&d1));
        assert_eq!(h.dim(), 1);
        let c = h.classes(&m(2, 1, &[&[1], &[1]])).unwrap();
        assert!(c.is_zero());
    }
}
