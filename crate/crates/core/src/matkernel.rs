//! Dense complex linear-algebra kernel.
//!
//! Hermitian eigendecomposition (cyclic Jacobi rotations), matrix functions
//! through the spectral theorem, spectral norms by power iteration on `A†A`,
//! and Kronecker products. This module is the exact-arithmetic oracle the rest
//! of the workbench is tested against, so it carries no dependencies and every
//! routine is deterministic for a fixed input.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 4096;

/// Dimension cap for dense operators. `HAMSIM_MAX_DIM` overrides the default,
/// read once per process.
pub fn max_dim() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("HAMSIM_MAX_DIM")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_DIM)
    })
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self.at(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Build from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Diagonal matrix from real values.
    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    /// Constructor tagged "hermitian": validates `||A - A†||_max <= 1e-12`.
    pub fn new_hermitian(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        let m = Self::new(rows, cols, entries);
        let defect = m.hermiticity_defect()?;
        if defect > 1e-12 {
            return Err(Error::NonHermitian(defect));
        }
        Ok(m)
    }

    /// Constructor tagged "unitary": validates `||U†U - I||_max <= 1e-10`.
    pub fn new_unitary(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        let m = Self::new(rows, cols, entries);
        let defect = m.unitarity_defect()?;
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        Ok(m)
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix product, ikj loop order for cache friendliness.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); n * m];
        for i in 0..n {
            for p in 0..k {
                let a = self.entries[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.entries[p * m..(p + 1) * m];
                let dst = &mut out[i * m..(i + 1) * m];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Self { rows: n, cols: m, entries: out }
    }

    /// Integer matrix power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square(), "pow: matrix must be square");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||A - A†||_max`; errors on non-square input.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquare(self.rows, self.cols));
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.at(i, j) - self.at(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }

    /// `||U†U - I||_max`; errors on non-square input.
    pub fn unitarity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquare(self.rows, self.cols));
        }
        let gram = self.dagger().matmul(self);
        Ok(gram.max_abs_diff(&Self::identity(self.rows)))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        matches!(self.hermiticity_defect(), Ok(d) if d <= tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        matches!(self.unitarity_defect(), Ok(d) if d <= tol)
    }

    /// Top-left `d x d` block.
    pub fn top_left_block(&self, d: usize) -> Self {
        assert!(d <= self.rows && d <= self.cols, "block larger than matrix");
        Self::from_fn(d, d, |i, j| self.at(i, j))
    }
}

/// Kronecker product with `a`'s indices as the high-order indices:
/// `kron(A, B)[i*p + k, j*q + l] = A[i,j] * B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let cap = max_dim();
    if rows > cap || cols > cap {
        return Err(Error::ResultTooLarge(rows.max(cols), cap));
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.at(i, j);
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.at(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix: `A = V diag(lambda) V†`,
/// eigenvalues ascending, eigenvectors in the columns of a unitary `V`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Reassemble `V diag(lambda) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for j in 0..n {
            let lam = Complex64::new(self.eigenvalues[j], 0.0);
            for i in 0..n {
                scaled.set(i, j, v.at(i, j) * lam);
            }
        }
        scaled.matmul(&v.dagger())
    }
}

const EIG_HERMITICITY_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius mass drops below
/// `1e-14 * ||A||_F`. Deterministic: fixed sweep order, no pivot search.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::NonSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    if n > max_dim() {
        return Err(Error::DimensionTooLarge(n, max_dim()));
    }
    let defect = a.hermiticity_defect()?;
    if defect > EIG_HERMITICITY_TOL {
        return Err(Error::NonHermitian(defect));
    }

    let mut work = a.clone();
    // Symmetrize exactly so rounding in the input cannot drift the sweeps.
    for i in 0..n {
        let d = work.at(i, i);
        work.set(i, i, Complex64::new(d.re, 0.0));
        for j in (i + 1)..n {
            let avg = (work.at(i, j) + work.at(j, i).conj()) * 0.5;
            work.set(i, j, avg);
            work.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let norm_f = work.frobenius_norm();
    if norm_f > 0.0 {
        let threshold = 1e-14 * norm_f;
        let max_sweeps = 100;
        let mut converged = false;
        for _ in 0..max_sweeps {
            if off_diagonal_mass(&work) < threshold {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut work, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_mass(&work) >= threshold {
            // Jacobi converges in well under 100 sweeps at the supported
            // dimensions; treat a miss as non-convergence.
            return Err(Error::NoConvergence(max_sweeps));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| work.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.at(i, order[j]));
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.at(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Hermitian Jacobi rotation zeroing the (p, q) entry of `a`,
/// accumulating the rotation into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.at(p, q);
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = a.at(p, p).re;
    let aqq = a.at(q, q).re;
    // cot(2 theta); stable smaller-root tangent.
    let theta = (app - aqq) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    // Rows p and q of R† A (columns follow by hermiticity).
    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let apj = a.at(p, j);
        let aqj = a.at(q, j);
        let new_pj = apj * c + aqj * (phase * s);
        let new_qj = apj * (-s * phase.conj()) + aqj * c;
        a.set(p, j, new_pj);
        a.set(j, p, new_pj.conj());
        a.set(q, j, new_qj);
        a.set(j, q, new_qj.conj());
    }
    let new_pp = c * c * app + 2.0 * s * c * r + s * s * aqq;
    let new_qq = s * s * app - 2.0 * s * c * r + c * c * aqq;
    a.set(p, p, Complex64::new(new_pp, 0.0));
    a.set(q, q, Complex64::new(new_qq, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));

    // V <- V R, columns p and q.
    for i in 0..n {
        let vip = v.at(i, p);
        let viq = v.at(i, q);
        v.set(i, p, vip * c + viq * (s * phase.conj()));
        v.set(i, q, vip * (-s * phase) + viq * c);
    }
}

/// Apply a scalar function to a Hermitian matrix through its spectrum:
/// `f(A) = V diag(f(lambda_i)) V†`.
pub fn func_hermitian(a: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a)?;
    let n = eig.eigenvalues.len();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for j in 0..n {
        let fj = f(eig.eigenvalues[j]);
        for i in 0..n {
            scaled.set(i, j, v.at(i, j) * fj);
        }
    }
    Ok(scaled.matmul(&v.dagger()))
}

/// Exact evolution operator `exp(-i H t)`.
pub fn expm_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    func_hermitian(h, |x| Complex64::from_polar(1.0, -t * x))
}

/// `exp(lambda H)` for complex `lambda`; unitary when `lambda` is pure
/// imaginary and `H` Hermitian.
pub fn expm_general(h: &ComplexMatrix, lambda: Complex64) -> Result<ComplexMatrix> {
    func_hermitian(h, |x| (lambda * x).exp())
}

const POWER_ITER_MAX: usize = 10_000;
const POWER_ITER_RTOL: f64 = 1e-10;
const POWER_ITER_STALL: usize = 400;

/// Largest singular value via power iteration on `A†A`.
///
/// The start vector is derived from a hash of the entries, so repeated calls
/// on the same matrix return the same value to the last bit. Convergence is
/// declared on the eigenpair residual `||Bv - lambda v|| <= 1e-10 lambda`
/// (for Hermitian `B = A†A` the residual rigorously bounds the distance of
/// `lambda` to the spectrum; consecutive-iterate differences can report
/// convergence long before the value is accurate when the top singular pair
/// is nearly degenerate: product-formula error operators produce exactly
/// such pairs). A stalled or capped iteration falls back to the Jacobi
/// eigensolver on `A†A`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NonSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(0.0);
    }
    if a.frobenius_norm() == 0.0 {
        return Ok(0.0);
    }

    let adag = a.dagger();
    let mut rng = crate::rng::SplitMix64::new(entry_hash(a));
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
        .collect();
    normalize(&mut v);

    let mut best_residual = f64::INFINITY;
    let mut since_improvement = 0usize;
    for _ in 0..POWER_ITER_MAX {
        let av = apply(a, &v);
        let bv = apply(&adag, &av); // B v with v normalized
        let lambda: f64 = v.iter().zip(&bv).map(|(x, y)| (x.conj() * y).re).sum();
        let residual: f64 = bv
            .iter()
            .zip(&v)
            .map(|(b, x)| (b - x * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= POWER_ITER_RTOL * lambda.max(f64::MIN_POSITIVE) {
            return Ok(lambda.max(0.0).sqrt());
        }
        v = bv;
        normalize(&mut v);
        if residual < 0.5 * best_residual {
            best_residual = residual;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= POWER_ITER_STALL {
                break;
            }
        }
    }
    spectral_norm_by_eig(a, &adag)
}

/// Exact route for the stalled case: `sigma = sqrt(lambda_max(A†A))`.
fn spectral_norm_by_eig(a: &ComplexMatrix, adag: &ComplexMatrix) -> Result<f64> {
    let gram = adag.matmul(a);
    let eig = eig_hermitian(&gram)?;
    let lam_max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(lam_max.max(0.0).sqrt())
}

fn entry_hash(a: &ComplexMatrix) -> u64 {
    // FNV-1a over the raw bit patterns plus the shape.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut absorb = |bits: u64| {
        for byte in bits.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    };
    absorb(a.rows() as u64);
    absorb(a.cols() as u64);
    for z in a.entries() {
        absorb(z.re.to_bits());
        absorb(z.im.to_bits());
    }
    h
}

fn apply(a: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let m = a.cols();
    a.entries()
        .chunks_exact(m)
        .map(|row| row.iter().zip(v).map(|(aij, vj)| aij * vj).sum())
        .collect()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm2(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// Random Hermitian matrix with Gaussian entries (GUE-style symmetrization),
/// deterministic per seed.
pub fn random_hermitian(n: usize, rng: &mut crate::rng::SplitMix64) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(
                i,
                j,
                Complex64::new(rng.next_gaussian(), rng.next_gaussian()) / 2f64.sqrt(),
            );
        }
    }
    g.add(&g.dagger()).scale_real(0.5)
}

/// Haar-flavored random unitary: evolution under a random Hermitian matrix.
pub fn random_unitary(n: usize, rng: &mut crate::rng::SplitMix64) -> ComplexMatrix {
    let h = random_hermitian(n, rng);
    expm_evolution(&h, 1.0).expect("random Hermitian input")
}
