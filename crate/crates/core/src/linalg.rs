//! Dense complex linear algebra at small dimension.
//!
//! Everything here is sized for reduced density matrices and local
//! observables: a handful of rows, occasionally a few hundred. Storage is
//! row-major and dense throughout.

use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Scalar type for amplitudes and matrix entries.
pub type Complex = Complex64;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero by [`sqrt_psd`].
pub const PSD_CLAMP: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// fraction of the input norm.
pub const JACOBI_REL_THRESHOLD: f64 = 1e-12;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Imaginary residue tolerated by [`real_trace_product`], relative to the
/// product of the factors' Frobenius norms.
pub const TRACE_IMAG_TOL: f64 = 1e-12;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// A general dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidShape {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dims(self.dim, other.dim)?;
        Ok(matmul_raw(self.dim, &self.data, &other.data))
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        check_dims(self.dim, other.dim)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            dim: self.dim,
            data,
        })
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.dim, &self.data)
    }
}

/// A dense Hermitian matrix.
///
/// Every constructor symmetrizes its input, so `get(i, j) == get(j, i).conj()`
/// holds bitwise and diagonal entries have exactly zero imaginary part.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl HermitianMatrix {
    /// Builds the Hermitian part `(A + A†)/2` of the matrix given by `f`.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex) -> Result<Self> {
        Self::symmetrize(&Matrix::from_fn(dim, f))
    }

    /// Builds from row vectors after checking that the input is Hermitian
    /// to within `tol` entrywise.
    pub fn from_rows(rows: &[Vec<Complex>], tol: f64) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidShape {
                expected: 1,
                found: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidShape {
                    expected: dim * dim,
                    found: dim * row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_matrix(&Matrix { dim, data }, tol)
    }

    /// Real symmetric input, checked to `tol`.
    pub fn from_real_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows, tol)
    }

    /// Checks `m` against Hermitian symmetry to within `tol`, then symmetrizes.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        let defect = m.hermitian_defect();
        if !(defect <= tol) {
            return Err(Error::NotHermitian(defect));
        }
        Self::symmetrize(m)
    }

    /// Hermitian part `(A + A†)/2`, without any symmetry check.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        let dim = m.dim;
        if dim == 0 {
            return Err(Error::InvalidShape {
                expected: 1,
                found: 0,
            });
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex::new(m.get(i, i).re, 0.0);
            for j in (i + 1)..dim {
                let z = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                data[i * dim + j] = z;
                data[j * dim + i] = z.conj();
            }
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "identity of dimension zero");
        let m = Matrix::identity(dim);
        Self {
            dim,
            data: m.data,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn matmul(&self, other: &HermitianMatrix) -> Result<Matrix> {
        check_dims(self.dim, other.dim)?;
        Ok(matmul_raw(self.dim, &self.data, &other.data))
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &HermitianMatrix, b: f64) -> Result<HermitianMatrix> {
        check_dims(self.dim, other.dim)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Ok(HermitianMatrix {
            dim: self.dim,
            data,
        })
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.combine(1.0, other, 1.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// Conjugation `U·self·U†` by a square matrix of the same size.
    pub fn conjugate_by(&self, u: &Matrix) -> Result<HermitianMatrix> {
        check_dims(self.dim, u.dim)?;
        let left = matmul_raw(self.dim, &u.data, &self.data);
        let full = matmul_raw(self.dim, &left.data, &u.adjoint().data);
        HermitianMatrix::symmetrize(&full)
    }

    /// Row-major real parts, one inner vector per row.
    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    /// Row-major imaginary parts.
    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.dim, &self.data)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HermitianMatrix", 3)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("entries_re", &self.real_rows())?;
        s.serialize_field("entries_im", &self.imag_rows())?;
        s.end()
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex> {
        (0..self.eigenvectors.dim).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// `Σ_k f(λ_k) v_k v_k†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let n = self.eigenvectors.dim;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        HermitianMatrix::from_fn(n, |i, j| {
            let mut acc = ZERO;
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += self.eigenvectors.get(i, k) * self.eigenvectors.get(j, k).conj() * w;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> Result<HermitianMatrix> {
        self.map_spectrum(|l| l)
    }
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    eig_with_sweep_limit(a, JACOBI_MAX_SWEEPS)
}

fn eig_with_sweep_limit(a: &HermitianMatrix, max_sweeps: usize) -> Result<SpectralDecomposition> {
    let n = a.dim;
    let mut work = a.to_matrix();
    let mut vecs = Matrix::identity(n);
    let threshold = JACOBI_REL_THRESHOLD * a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&work);
        if off <= threshold {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work.get(i, i).re.total_cmp(&work.get(j, j).re));
    let eigenvalues = order.iter().map(|&k| work.get(k, k).re).collect();
    let eigenvectors = Matrix::from_fn(n, |i, k| vecs.get(i, order[k]));
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilates `work[p][q]` with a rotation in the `(p, q)` plane and
/// accumulates it into `vecs`.
fn rotate(work: &mut Matrix, vecs: &mut Matrix, p: usize, q: usize) {
    let z = work.get(p, q);
    let r = z.norm();
    if r <= f64::MIN_POSITIVE {
        return;
    }
    let [g_pp, g_pq, g_qp, g_qq] = jacobi_rotation(work.get(p, p).re, work.get(q, q).re, z);

    let n = work.dim;
    // work <- work · G, vecs <- vecs · G
    for k in 0..n {
        let (akp, akq) = (work.get(k, p), work.get(k, q));
        work.set(k, p, akp * g_pp + akq * g_qp);
        work.set(k, q, akp * g_pq + akq * g_qq);
        let (vkp, vkq) = (vecs.get(k, p), vecs.get(k, q));
        vecs.set(k, p, vkp * g_pp + vkq * g_qp);
        vecs.set(k, q, vkp * g_pq + vkq * g_qq);
    }
    // work <- G† · work
    for k in 0..n {
        let (apk, aqk) = (work.get(p, k), work.get(q, k));
        work.set(p, k, g_pp.conj() * apk + g_qp.conj() * aqk);
        work.set(q, k, g_pq.conj() * apk + g_qq.conj() * aqk);
    }
    work.set(p, q, ZERO);
    work.set(q, p, ZERO);
    let (dp, dq) = (work.get(p, p).re, work.get(q, q).re);
    work.set(p, p, Complex::new(dp, 0.0));
    work.set(q, q, Complex::new(dq, 0.0));
}

/// Entries `[g_pp, g_pq, g_qp, g_qq]` of the unitary `G = diag(1, ω̄)·R`
/// that diagonalizes `[[app, z], [z̄, aqq]]` as `G†·A·G`, where `ω` is the
/// phase of `z` and `R` a real Jacobi rotation.
fn jacobi_rotation(app: f64, aqq: f64, z: Complex) -> [Complex; 4] {
    let r = z.norm();
    let omega_bar = (z / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    [Complex::new(c, 0.0), Complex::new(s, 0.0), omega_bar * (-s), omega_bar * c]
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.dim {
        for j in 0..m.dim {
            if i != j {
                acc += m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` are clamped to zero; anything more
/// negative is rejected. Positive eigenvalues at or below the rounding
/// floor `8·ε·dim·‖A‖_F` are also taken as zero, since the square root
/// would otherwise turn ~1e-17 of noise into ~1e-9.
pub fn sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let decomp = eig_hermitian(a)?;
    if let Some(&lowest) = decomp.eigenvalues.first() {
        if lowest < -PSD_CLAMP {
            return Err(Error::NotPsd(lowest));
        }
    }
    let floor = 8.0 * f64::EPSILON * a.dim as f64 * a.frobenius_norm();
    decomp.map_spectrum(|l| if l <= floor { 0.0 } else { l.sqrt() })
}

/// `(B·B†)^{1/2}` for a `rows × cols` factor `B` given row-major.
///
/// One-sided Jacobi rotations orthogonalize the rows of `B`; the row norms
/// are then the singular values `σ` and `(BB†)^{1/2} = U·diag(σ)·U†`. This
/// never squares and re-roots small singular values, so rank-deficient
/// Gram matrices (reduced states of nearly product states) get square
/// roots accurate to rounding instead of to `√ε`.
pub fn sqrt_gram(rows: usize, factor: &[Complex]) -> Result<HermitianMatrix> {
    if rows == 0 || !factor.len().is_multiple_of(rows) {
        return Err(Error::InvalidShape {
            expected: rows,
            found: factor.len(),
        });
    }
    if factor.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("Gram factor"));
    }
    let cols = factor.len() / rows;
    let mut b = factor.to_vec();
    let mut u = Matrix::identity(rows);

    // Rows below rounding relative to the whole factor carry no resolvable
    // direction; rotating them only chases noise.
    let noise_floor = (f64::EPSILON * factor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).powi(2);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut worst = 0.0f64;
        for p in 0..rows {
            for q in (p + 1)..rows {
                let (bp, bq) = (&b[p * cols..(p + 1) * cols], &b[q * cols..(q + 1) * cols]);
                let alpha: f64 = bp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = bq.iter().map(|z| z.norm_sqr()).sum();
                let cross: Complex = bp.iter().zip(bq).map(|(x, y)| x * y.conj()).sum();
                let r = cross.norm();
                let scale = alpha.sqrt() * beta.sqrt();
                if alpha.min(beta) <= noise_floor || r <= GRAM_ORTHO_TOL * scale {
                    continue;
                }
                worst = worst.max(r / scale);
                rotated = true;
                let [g_pp, g_pq, g_qp, g_qq] = jacobi_rotation(alpha, beta, cross);
                for k in 0..cols {
                    let (x, y) = (b[p * cols + k], b[q * cols + k]);
                    b[p * cols + k] = g_pp.conj() * x + g_qp.conj() * y;
                    b[q * cols + k] = g_pq.conj() * x + g_qq.conj() * y;
                }
                for k in 0..rows {
                    let (ukp, ukq) = (u.get(k, p), u.get(k, q));
                    u.set(k, p, ukp * g_pp + ukq * g_qp);
                    u.set(k, q, ukp * g_pq + ukq * g_qq);
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: worst,
            });
        }
    }

    let sigma: Vec<f64> = (0..rows)
        .map(|p| b[p * cols..(p + 1) * cols].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    HermitianMatrix::from_fn(rows, |i, j| {
        (0..rows).map(|k| u.get(i, k) * u.get(j, k).conj() * sigma[k]).sum()
    })
}

/// Rows of a Gram factor count as orthogonal once their normalized inner
/// product is below this.
const GRAM_ORTHO_TOL: f64 = 1e-15;

/// `Tr(A₁·A₂·…·Aₖ)`.
pub fn trace_product(factors: &[&HermitianMatrix]) -> Result<Complex> {
    let Some((first, rest)) = factors.split_first() else {
        return Err(Error::InvalidShape {
            expected: 1,
            found: 0,
        });
    };
    let dim = first.dim;
    for f in rest {
        check_dims(dim, f.dim)?;
    }
    if rest.is_empty() {
        return Ok(Complex::new(first.trace(), 0.0));
    }
    let mut acc = first.to_matrix();
    for f in &rest[..rest.len() - 1] {
        acc = matmul_raw(dim, &acc.data, &f.data);
    }
    // The last product only needs its diagonal.
    let last = rest[rest.len() - 1];
    let mut tr = ZERO;
    for i in 0..dim {
        for k in 0..dim {
            tr += acc.get(i, k) * last.get(k, i);
        }
    }
    Ok(tr)
}

/// [`trace_product`] for products known to have a real trace, such as
/// `Tr ρK²` or `Tr ρ^{1/2}Kρ^{1/2}K`; the imaginary residue is checked
/// against [`TRACE_IMAG_TOL`] before it is dropped.
pub fn real_trace_product(factors: &[&HermitianMatrix]) -> Result<f64> {
    let tr = trace_product(factors)?;
    let scale = factors
        .iter()
        .map(|f| f.frobenius_norm())
        .product::<f64>()
        .max(1.0);
    if !(tr.im.abs() <= TRACE_IMAG_TOL * scale) {
        return Err(Error::ComplexTrace(tr.im));
    }
    Ok(tr.re)
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Matrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Kronecker product `A ⊗ B` of square matrices.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (m, n) = (a.dim, b.dim);
    Matrix::from_fn(m * n, |i, j| a.get(i / n, j / n) * b.get(i % n, j % n))
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

fn matmul_raw(n: usize, a: &[Complex], b: &[Complex]) -> Matrix {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    Matrix { dim: n, data: out }
}

fn frobenius(data: &[Complex]) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn write_rows(f: &mut fmt::Formatter<'_>, dim: usize, data: &[Complex]) -> fmt::Result {
    let rows: Vec<&[Complex]> = if dim == 0 { Vec::new() } else { data.chunks(dim).collect() };
    f.debug_list().entries(rows).finish()
}
