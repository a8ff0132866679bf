//! Dense complex linear algebra with an explicit tolerance policy.
//!
//! All equality judgements in the crate are relative Frobenius comparisons,
//! `‖x − y‖₂ ≤ tol · max(1, ‖x‖₂)`, so tests behave the same across
//! dimensions and scales. Eigendecompositions are canonicalized: eigenvalues
//! sorted descending, each eigenvector's first nonzero component made real
//! positive. Channel extraction downstream relies on this being reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Scalar = Complex<f64>;

pub const ZERO: Scalar = Complex::new(0.0, 0.0);
pub const ONE: Scalar = Complex::new(1.0, 0.0);
pub const I: Scalar = Complex::new(0.0, 1.0);

/// Tolerances and iteration caps shared by every numerical routine.
///
/// Passed explicitly; there is no global mutable state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative tolerance for equality judgements.
    pub eq_tol: f64,
    /// Relative eigenvalue floor for positive-semidefiniteness.
    pub psd_tol: f64,
    /// Convergence tolerance for iterative solvers.
    pub opt_tol: f64,
    /// Iteration cap for iterative solvers.
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            psd_tol: 1e-9,
            opt_tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eq_tol > 0.0 && self.psd_tol > 0.0 && self.opt_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    /// All-ones matrix; the Schur identity.
    pub fn ones(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: vec![ONE; n * n],
        }
    }

    pub fn diagonal(diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, reals: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            reals.iter().map(|&r| Complex::new(r, 0.0)).collect(),
        )
    }

    /// Builds from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Rank-one |u⟩⟨v|.
    pub fn outer(u: &[Scalar], v: &[Scalar]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn diag(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        self.diag().into_iter().sum()
    }

    pub fn scale(&self, factor: Scalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect())
    }

    /// A ρ A†, the conjugation appearing in Kraus sums.
    pub fn conjugate_with(&self, rho: &Self) -> Result<Self> {
        self.matmul(rho)?.matmul(&self.adjoint())
    }

    /// Frobenius norm; equals the Schatten 2-norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Relative equality: ‖self − other‖₂ ≤ tol · max(1, ‖self‖₂).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let diff: f64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation()
            .map(|d| d <= tol * self.frobenius_norm().max(1.0))
            .unwrap_or(false)
    }

    fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                dev += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        Some(dev.sqrt())
    }

    /// Row-major vectorization; matches the Choi convention used in
    /// [`crate::channels`].
    pub fn vec_rows(&self) -> Vec<Scalar> {
        self.entries.clone()
    }

    /// Inverse of [`Self::vec_rows`] for square matrices.
    pub fn from_vec_rows(n: usize, v: Vec<Scalar>) -> Result<Self> {
        Self::new(n, n, v)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<Scalar> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.entries.iter().copied())
    }

    fn from_nalgebra(m: &DMatrix<Scalar>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs).expect("shape mismatch in +")
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs).expect("shape mismatch in -")
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in *")
    }
}

/// Entrywise (Schur/Hadamard) product of two equally shaped matrices.
pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        entries: a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| x * y)
            .collect(),
    })
}

/// Canonical Hermitian eigendecomposition.
///
/// `matrix ≈ V diag(λ) V†` with `eigenvalues` descending and each column of
/// `eigenvectors` phase-fixed so that its first non-negligible component is
/// real positive.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    pub fn eigenvector(&self, k: usize) -> Vec<Scalar> {
        self.eigenvectors.column(k)
    }

    /// V diag(λ) V†, for round-trip checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| {
                    self.eigenvectors.get(i, k)
                        * self.eigenvalues[k]
                        * self.eigenvectors.get(j, k).conj()
                })
                .sum()
        })
    }
}

/// Eigendecomposition of a Hermitian matrix, canonicalized for reproducible
/// downstream Kraus extraction.
pub fn herm_eig(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation().unwrap_or(f64::INFINITY);
    if dev > tol.eq_tol * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    // Symmetrize before handing off so roundoff in the input cannot leak
    // imaginary parts into the eigenvalues.
    let na = m.to_nalgebra();
    let herm = (&na + na.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(herm);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (slot, &k) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[k]);
        let col: DVector<Scalar> = eig.eigenvectors.column(k).into();
        let phase = canonical_phase(col.as_slice());
        for i in 0..n {
            vecs.set(i, slot, col[i] * phase);
        }
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Phase factor making the first non-negligible component real positive.
fn canonical_phase(v: &[Scalar]) -> Scalar {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return ONE;
    }
    for z in v {
        if z.norm() > 1e-12 * max {
            return z.conj() / z.norm();
        }
    }
    ONE
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &ComplexMatrix, tol: &ToleranceConfig) -> f64 {
    singular_values(m, tol).first().copied().unwrap_or(0.0)
}

/// Singular values in descending order, via the eigenvalues of M†M.
pub fn singular_values(m: &ComplexMatrix, tol: &ToleranceConfig) -> Vec<f64> {
    let gram = m
        .adjoint()
        .matmul(m)
        .expect("adjoint product is always conformable");
    // Gram matrices are Hermitian by construction.
    let eig = herm_eig(&gram, tol).expect("Gram matrix must be Hermitian");
    eig.eigenvalues
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// True iff `m` is Hermitian with min eigenvalue ≥ −psd_tol · ‖m‖₂.
pub fn is_psd(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    let eig = herm_eig(m, tol)?;
    Ok(psd_from_spectrum(&eig.eigenvalues, tol))
}

fn psd_from_spectrum(eigenvalues: &[f64], tol: &ToleranceConfig) -> bool {
    let scale = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    eigenvalues
        .iter()
        .all(|&l| l >= -tol.psd_tol * scale.max(f64::MIN_POSITIVE))
}

/// Schatten p-norm, (Σ σᵢᵖ)^{1/p}; p = 1 is the trace norm, p = 2 Frobenius.
pub fn schatten_norm(m: &ComplexMatrix, p: f64, tol: &ToleranceConfig) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten norm needs p >= 1, got {p}"
        )));
    }
    if p == 2.0 {
        return Ok(m.frobenius_norm());
    }
    let sv = singular_values(m, tol);
    Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

fn spectral_function(
    m: &ComplexMatrix,
    tol: &ToleranceConfig,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, tol)?;
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    if !psd_from_spectrum(&eig.eigenvalues, tol) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.eigenvalues.last().copied().unwrap_or(0.0),
        });
    }
    let n = m.rows();
    let vals: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            // Clamp the roundoff-negative tail of the spectrum.
            if l <= tol.psd_tol * scale.max(1.0) && l < 0.0 {
                f(0.0)
            } else {
                f(l.max(0.0))
            }
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| eig.eigenvectors.get(i, k) * vals[k] * eig.eigenvectors.get(j, k).conj())
            .sum()
    }))
}

/// Principal square root of a PSD matrix.
pub fn matrix_sqrt(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    spectral_function(m, tol, f64::sqrt)
}

/// Base-2 matrix logarithm restricted to the support of a PSD matrix.
pub fn matrix_log2(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, tol)?;
    if !psd_from_spectrum(&eig.eigenvalues, tol) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.eigenvalues.last().copied().unwrap_or(0.0),
        });
    }
    let n = m.rows();
    let vals: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > tol.psd_tol { l.log2() } else { 0.0 })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| eig.eigenvectors.get(i, k) * vals[k] * eig.eigenvectors.get(j, k).conj())
            .sum()
    }))
}

/// Von Neumann entropy in bits, with 0·log 0 := 0.
pub fn von_neumann_entropy(rho: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let eig = herm_eig(rho, tol)?;
    if !psd_from_spectrum(&eig.eigenvalues, tol) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.eigenvalues.last().copied().unwrap_or(0.0),
        });
    }
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > tol.psd_tol)
        .map(|&l| -l * l.log2())
        .sum())
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(p: &[f64], tol: &ToleranceConfig) -> f64 {
    p.iter()
        .filter(|&&x| x > tol.psd_tol)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Kronecker product in the ordered basis |i₁i₂⟩.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a.get(i / rb, j / cb) * b.get(i % rb, j % cb)
    })
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed random unitary via QR of a Gaussian matrix with the
/// phase convention fixed on the R diagonal.
pub fn random_unitary(n: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(n, n, rng).to_nalgebra();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::from_nalgebra(&q);
    for j in 0..n {
        let rjj: Scalar = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..n {
            u.set(i, j, u.get(i, j) * phase);
        }
    }
    u
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an operator on C^{d₁} ⊗ C^{d₂}.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    let d = d1 * d2;
    if m.rows() != d || m.cols() != d {
        return Err(Error::ShapeMismatch(format!(
            "expected {d}x{d} for dims ({d1},{d2}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    match keep {
        Subsystem::First => Ok(ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m.get(i * d2 + k, j * d2 + k)).sum()
        })),
        Subsystem::Second => Ok(ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m.get(k * d2 + i, k * d2 + j)).sum()
        })),
    }
}
