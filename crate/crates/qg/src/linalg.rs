//! Dense complex matrix kernel: Kronecker products, leg embeddings on two- and
//! three-fold tensor spaces, partial traces, the flip operator, and
//! tolerance-based comparison.
//!
//! Index convention used everywhere: the basis of `H ⊗ H` is ordered so that
//! `δ_s ⊗ δ_t` sits at index `s·d + t`, and matrices are stored row-major.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Hard cap on dense matrix dimension; triple-leg operators beyond this must
/// go through the sparse path.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("shape mismatch: ({0}x{1}) vs ({2}x{3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("non-finite entry at ({0},{1})")]
    NonFinite(usize, usize),
    #[error("dense dimension {0} exceeds cap {MAX_DENSE_DIM}")]
    DimensionCap(usize),
    #[error("expected a {0}x{0} matrix on the doubled space, got {1}x{2}")]
    NotDoubled(usize, usize, usize),
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

/// Absolute + relative tolerance for residual comparisons.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { absolute: 1e-10, relative: 1e-10 }
    }
}

impl Tolerance {
    pub fn absolute(tol: f64) -> Self {
        Tolerance { absolute: tol, relative: 0.0 }
    }
}

/// Outcome of an approximate comparison.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Validates that every entry is finite; rejects NaN/Inf inputs.
    pub fn checked(self) -> Result<Self, LinalgError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.data[i * self.cols + j];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
            }
        }
        Ok(self)
    }

    /// Matrix unit E_{ij}.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = Complex64::new(1.0, 0.0);
        m
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[Complex64]) -> Self {
        CMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn diag(v: &[Complex64]) -> Self {
        let mut m = Self::zeros(v.len(), v.len());
        for (i, z) in v.iter().enumerate() {
            m.data[i * v.len() + i] = *z;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Row-major vectorization, so `vec(M)[i·cols + j] = M[i,j]`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols);
        CMatrix { rows, cols, data: v.to_vec() }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row_out = &mut out.data[i * other.cols..(i + 1) * other.cols];
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// tr(B* A), the Hilbert-Schmidt inner product.
    pub fn hs_inner(&self, other: &CMatrix) -> Complex64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum()
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product with `(a⊗b)[(i·rb+k),(j·cb+l)] = a[i,j]·b[k,l]`,
/// matching the basis convention `δ_s ⊗ δ_t ↦ s·d + t`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_DENSE_DIM || cols > MAX_DENSE_DIM {
        return Err(LinalgError::DimensionCap(rows.max(cols)));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Flip operator σ on `H ⊗ H`: σ(δ_s ⊗ δ_t) = δ_t ⊗ δ_s.
pub fn flip_operator(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for s in 0..d {
        for t in 0..d {
            m.set(t * d + s, s * d + t, Complex64::new(1.0, 0.0));
        }
    }
    m
}

/// Which pair of legs a doubled-space operator occupies inside the triple
/// tensor space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Legs {
    L12,
    L13,
    L23,
}

/// Embeds a `d²×d²` operator into `H⊗H⊗H` on the given legs.
///
/// `X₁₂ = x⊗I`, `X₂₃ = I⊗x`, and `X₁₃ = (σ⊗I)(I⊗x)(σ⊗I)` so that the middle
/// leg is untouched.
pub fn leg_embed(x: &CMatrix, legs: Legs, d: usize) -> Result<CMatrix, LinalgError> {
    if x.rows != d * d || x.cols != d * d {
        return Err(LinalgError::NotDoubled(d * d, x.rows, x.cols));
    }
    let id = CMatrix::identity(d);
    match legs {
        Legs::L12 => kron(x, &id),
        Legs::L23 => kron(&id, x),
        Legs::L13 => {
            let swap = kron(&flip_operator(d), &id)?;
            let inner = kron(&id, x)?;
            Ok(&(&swap * &inner) * &swap)
        }
    }
}

/// Which single leg of the doubled space to act on / trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    First,
    Second,
}

/// Partial trace of a `d²×d²` matrix over one leg.
///
/// Tracing the second leg returns `(id⊗tr)`: `out[i,j] = Σ_k a[i·d+k, j·d+k]`.
pub fn partial_trace(a: &CMatrix, leg: Leg, d: usize) -> Result<CMatrix, LinalgError> {
    if a.rows != d * d || a.cols != d * d {
        return Err(LinalgError::NotDoubled(d * d, a.rows, a.cols));
    }
    let mut out = CMatrix::zeros(d, d);
    match leg {
        Leg::Second => {
            for i in 0..d {
                for j in 0..d {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        s += a.get(i * d + k, j * d + k);
                    }
                    out.set(i, j, s);
                }
            }
        }
        Leg::First => {
            for i in 0..d {
                for j in 0..d {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        s += a.get(k * d + i, k * d + j);
                    }
                    out.set(i, j, s);
                }
            }
        }
    }
    Ok(out)
}

/// Frobenius comparison: passes iff
/// `‖a−b‖_F ≤ tol.absolute + tol.relative·max(‖a‖_F, ‖b‖_F)`.
pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: Tolerance) -> Result<ResidualReport, LinalgError> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(LinalgError::ShapeMismatch(a.rows, a.cols, b.rows, b.cols));
    }
    let residual = (a - b).fro_norm();
    let threshold = tol.absolute + tol.relative * a.fro_norm().max(b.fro_norm());
    Ok(ResidualReport { residual, threshold, pass: residual <= threshold })
}

/// Serialized form: `{"rows": int, "cols": int, "data": [[re, im], ...]}`
/// row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixDocument {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, LinalgError> {
        if self.data.len() != self.rows * self.cols {
            return Err(LinalgError::ShapeMismatch(self.rows, self.cols, self.data.len(), 1));
        }
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        }
        .checked()
    }
}

// ---------------------------------------------------------------------------
// Sparse path for triple-leg checks at larger dimension.
// ---------------------------------------------------------------------------

/// Square sparse matrix in row-sorted coordinate form. Used only for the
/// triple-leg pentagon/commutation checks where dense d³×d³ storage is out
/// of reach; group-derived unitaries are permutations so products stay sparse.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub dim: usize,
    /// rows[i] = sorted (col, value) pairs.
    pub rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        assert!(m.is_square());
        let mut s = Self::zeros(m.rows);
        for i in 0..m.rows {
            for j in 0..m.cols {
                let z = m.get(i, j);
                if z.norm_sqr() != 0.0 {
                    s.rows[i].push((j, z));
                }
            }
        }
        s
    }

    pub fn matmul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zeros(self.dim);
        let mut acc: std::collections::BTreeMap<usize, Complex64> = Default::default();
        for i in 0..self.dim {
            acc.clear();
            for &(k, a) in &self.rows[i] {
                for &(j, b) in &other.rows[k] {
                    *acc.entry(j).or_insert(Complex64::new(0.0, 0.0)) += a * b;
                }
            }
            out.rows[i] = acc.iter().map(|(&j, &v)| (j, v)).collect();
        }
        out
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for &(j, v) in &self.rows[i] {
                out.rows[j].push((i, v.conj()));
            }
        }
        for row in &mut out.rows {
            row.sort_by_key(|&(j, _)| j);
        }
        out
    }

    /// self · rhs with a dense right factor.
    pub fn mul_dense(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.rows);
        let mut out = CMatrix::zeros(self.dim, rhs.cols);
        for i in 0..self.dim {
            for &(k, v) in &self.rows[i] {
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v * rhs.get(k, j));
                }
            }
        }
        out
    }

    /// lhs · self with a dense left factor.
    pub fn dense_mul(&self, lhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, lhs.cols);
        let mut out = CMatrix::zeros(lhs.rows, self.dim);
        for k in 0..self.dim {
            for &(j, v) in &self.rows[k] {
                for i in 0..lhs.rows {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + lhs.get(i, k) * v);
                }
            }
        }
        out
    }

    /// self* · a · self, cheap when self has few entries per row.
    pub fn conjugate_dense(&self, a: &CMatrix) -> CMatrix {
        self.adjoint().mul_dense(&self.dense_mul(a))
    }

    pub fn sub_fro_norm(&self, other: &SparseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut total = 0.0;
        let mut acc: std::collections::BTreeMap<usize, Complex64> = Default::default();
        for i in 0..self.dim {
            acc.clear();
            for &(j, v) in &self.rows[i] {
                *acc.entry(j).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
            for &(j, v) in &other.rows[i] {
                *acc.entry(j).or_insert(Complex64::new(0.0, 0.0)) -= v;
            }
            total += acc.values().map(|z| z.norm_sqr()).sum::<f64>();
        }
        total.sqrt()
    }

    /// Embeds a sparse `d²×d²` operator into the triple space `d³×d³`.
    pub fn leg_embed(x: &SparseMatrix, legs: Legs, d: usize) -> SparseMatrix {
        assert_eq!(x.dim, d * d);
        let mut out = Self::zeros(d * d * d);
        for r in 0..x.dim {
            let (a, b) = (r / d, r % d);
            for &(c, v) in &x.rows[r] {
                let (p, q) = (c / d, c % d);
                for m in 0..d {
                    let (ri, ci) = match legs {
                        Legs::L12 => (a * d * d + b * d + m, p * d * d + q * d + m),
                        Legs::L23 => (m * d * d + a * d + b, m * d * d + p * d + q),
                        Legs::L13 => (a * d * d + m * d + b, p * d * d + m * d + q),
                    };
                    out.rows[ri].push((ci, v));
                }
            }
        }
        for row in &mut out.rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        out
    }
}

/// Conversion into nalgebra for factorizations (SVD, eigen).
pub fn to_nalgebra(m: &CMatrix) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(m.rows, m.cols, |i, j| m.get(i, j))
}

pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Standard-normal sample via Box-Muller.
pub fn gaussian(rng: &mut impl rand::Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

/// Random matrix with iid complex Gaussian entries.
pub fn random_matrix(rng: &mut impl rand::Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

/// Random matrix with trace subtracted off the diagonal uniformly.
pub fn random_trace_zero(rng: &mut impl rand::Rng, n: usize) -> CMatrix {
    let mut m = random_matrix(rng, n, n);
    let shift = m.trace() / n as f64;
    for i in 0..n {
        let z = m.get(i, i) - shift;
        m.set(i, i, z);
    }
    m
}
