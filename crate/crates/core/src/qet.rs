//! Eigenvalue transformation of block-encoded Hermitian operators.
//!
//! The qubitized walk operator `W = (2 Pi - I) U`, where `Pi` projects onto
//! the ancilla `|0...0>` subspace, rotates each eigenvector pair by the
//! eigenvalue angle, so the top-left block of `W^k` is the Chebyshev
//! polynomial `T_k` of the encoded operator. Arbitrary polynomials are then
//! linear combinations of walk powers, with the select over powers applied
//! cumulatively so a degree-`K` series costs `K` walk applications.
//!
//! The Chebyshev identity needs a self-inverse dilation. `encode_hermitian`
//! already produces one; any other encoding is first symmetrized with one
//! extra ancilla qubit (`qubitize`), whose block is the Hermitian part of the
//! original block.
//!
//! Polynomial application is LCU-over-Chebyshev-blocks rather than a phase
//! sequence: the encoded block is identical, the error bookkeeping stays
//! certified, and complex coefficient series are handled natively (the
//! evolution series has complex coefficients).

use num_complex::Complex64;

use crate::blockenc::{self, BlockEncoding};
use crate::error::{Error, Result};
use crate::matkernel::{self, max_dim, ComplexMatrix};

/// Complex coefficients `c_0..c_K` in the Chebyshev-T basis on `[-1, 1]`,
/// with a certified uniform bound on everything the truncation dropped.
#[derive(Debug, Clone)]
pub struct ChebyshevSeries {
    pub coeffs: Vec<Complex64>,
    pub remainder_bound: f64,
}

impl ChebyshevSeries {
    pub fn new(coeffs: Vec<Complex64>, remainder_bound: f64) -> Self {
        assert!(remainder_bound >= 0.0);
        assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        Self { coeffs, remainder_bound }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `sum |c_k|`, the LCU subnormalization of the series.
    pub fn one_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Clenshaw evaluation of `sum c_k T_k(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.coeffs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for k in (1..n).rev() {
            let b = self.coeffs[k] + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// Max of `|P|` over the fixed 1001-point Chebyshev grid.
    pub fn max_abs_on_grid(&self) -> f64 {
        guard_grid().iter().map(|&x| self.eval(x).norm()).fold(0.0, f64::max)
    }
}

/// 1001 Chebyshev points of `[-1, 1]`, endpoints included.
pub fn guard_grid() -> Vec<f64> {
    (0..=1000)
        .map(|i| (std::f64::consts::PI * i as f64 / 1000.0).cos())
        .collect()
}

const BLOCK_HERMITICITY_TOL: f64 = 1e-8;

/// Self-inverse dilation realizing the same (Hermitian part of the) block.
///
/// Explicit encodings that are already self-inverse pass through unchanged;
/// anything else gains one ancilla qubit. Tracked encodings rebuild the
/// minimal self-inverse dilation from the block directly.
fn qubitize(be: &BlockEncoding) -> Result<BlockEncoding> {
    let block = be.block();
    let defect = block.hermiticity_defect()?;
    if defect > BLOCK_HERMITICITY_TOL {
        return Err(Error::BlockNotHermitian(defect));
    }
    match be.unitary() {
        Some(u) if u.max_abs_diff(&u.dagger()) <= 1e-10 => Ok(be.clone()),
        Some(u) => {
            let n = u.rows();
            if 2 * n > max_dim() {
                return Err(Error::ResultTooLarge(2 * n, max_dim()));
            }
            // (H ⊗ I) (|1><0| ⊗ U + |0><1| ⊗ U†) (H ⊗ I)
            //   = 1/2 [[U + U†, U - U†], [U† - U, -(U + U†)]]
            // Self-inverse; its block is the Hermitian part of the original.
            let udag = u.dagger();
            let sum = u.add(&udag).scale_real(0.5);
            let diff = u.sub(&udag).scale_real(0.5);
            let mut big = ComplexMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    big.set(i, j, sum.at(i, j));
                    big.set(i, n + j, diff.at(i, j));
                    big.set(n + i, j, -diff.at(i, j));
                    big.set(n + i, n + j, -sum.at(i, j));
                }
            }
            Ok(BlockEncoding::from_explicit(
                big,
                be.alpha(),
                be.ancillas() + 1,
                be.epsilon(),
                be.system_dim(),
            )
            .with_walk_apps(be.walk_apps()))
        }
        None => {
            let herm_block = symmetrize(&block);
            let embedded = blockenc::encode_hermitian(&herm_block)?;
            Ok(BlockEncoding::from_explicit(
                embedded.unitary().expect("explicit dilation").clone(),
                be.alpha(),
                1,
                be.epsilon(),
                be.system_dim(),
            )
            .with_walk_apps(be.walk_apps()))
        }
    }
}

fn symmetrize(a: &ComplexMatrix) -> ComplexMatrix {
    a.add(&a.dagger()).scale_real(0.5)
}

/// The qubitized walk unitary `W = (2 Pi - I) U`, on the (possibly enlarged)
/// self-inverse dilation of `be`. Powers of `W` have top-left block
/// `T_k(A/alpha)`.
pub fn walk_operator(be: &BlockEncoding) -> Result<ComplexMatrix> {
    let qb = qubitize(be)?;
    Ok(reflect_ancilla_zero(
        qb.unitary().expect("qubitize yields an explicit dilation"),
        qb.system_dim(),
    ))
}

/// Left-multiply by `2 Pi - I`: negate every row outside the ancilla-zero
/// subspace (the first `d` rows).
fn reflect_ancilla_zero(u: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| {
        if i < d {
            u.at(i, j)
        } else {
            -u.at(i, j)
        }
    })
}

/// Encoding of `T_k(A/alpha)` with `alpha = 1`; epsilon grows by the
/// `4 d sqrt(eps/alpha)` rule with `d = k`.
pub fn chebyshev_block(be: &BlockEncoding, k: u32) -> Result<BlockEncoding> {
    let out = if be.is_explicit() {
        let qb = qubitize(be)?;
        let w = reflect_ancilla_zero(qb.unitary().unwrap(), qb.system_dim());
        let mut wk = ComplexMatrix::identity(w.rows());
        for _ in 0..k {
            wk = wk.matmul(&w);
        }
        BlockEncoding::from_explicit(wk, 1.0, qb.ancillas(), 0.0, be.system_dim())
    } else {
        let b = symmetrize(&be.block());
        let defect = be.block().hermiticity_defect()?;
        if defect > BLOCK_HERMITICITY_TOL {
            return Err(Error::BlockNotHermitian(defect));
        }
        BlockEncoding::tracked(chebyshev_of_matrix(&b, k), 1.0, be.ancillas().max(1), 0.0)
    };
    let epsilon = cheb_epsilon(be, k);
    Ok(out
        .with_epsilon(epsilon)
        .with_walk_apps(be.walk_apps() + u64::from(k)))
}

fn cheb_epsilon(be: &BlockEncoding, k: u32) -> f64 {
    if be.epsilon() == 0.0 {
        0.0
    } else {
        4.0 * f64::from(k) * (be.epsilon() / be.alpha()).sqrt()
    }
}

/// `T_k(B)` by the three-term recurrence.
fn chebyshev_of_matrix(b: &ComplexMatrix, k: u32) -> ComplexMatrix {
    let n = b.rows();
    match k {
        0 => ComplexMatrix::identity(n),
        1 => b.clone(),
        _ => {
            let mut prev = ComplexMatrix::identity(n);
            let mut curr = b.clone();
            for _ in 2..=k {
                let next = b.matmul(&curr).scale_real(2.0).sub(&prev);
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Apply `P(A/alpha) = sum c_k T_k(A/alpha)` to a block-encoded Hermitian
/// operator: LCU over walk powers.
///
/// The series is rejected when its grid sup-norm exceeds 1; a sup-norm above
/// 1/2 is accepted but flagged on the result. The encoded operator is `P`
/// divided by `beta_P = sum |c_k|` when `beta_P > 1` (padding otherwise), so
/// the resulting alpha is `max(beta_P, 1)`; epsilon composes per the LCU rule
/// plus the series remainder.
pub fn apply_chebyshev_series(be: &BlockEncoding, series: &ChebyshevSeries) -> Result<BlockEncoding> {
    if series.coeffs.is_empty() {
        return Err(Error::EmptySeries);
    }
    // A truncation of a unit-modulus function may poke above 1 by its own
    // remainder; that slack is part of the certificate, anything beyond is
    // a genuine violation.
    let sup = series.max_abs_on_grid();
    if sup > 1.0 + series.remainder_bound + 1e-9 {
        return Err(Error::PolynomialTooLarge(sup));
    }
    let half_violated = sup > 0.5;

    let degree = series.degree() as u32;
    let beta_p = series.one_norm();

    // Chebyshev blocks share one walk space; powers accumulate so the whole
    // series costs `degree` walk applications.
    let mut blocks: Vec<BlockEncoding> = Vec::with_capacity(series.coeffs.len());
    if be.is_explicit() {
        let qb = qubitize(be)?;
        let lcu_sel = series.coeffs.len().next_power_of_two().trailing_zeros();
        let out_dim = (1usize << (qb.ancillas() + lcu_sel)) * be.system_dim();
        if out_dim > max_dim() {
            return Err(Error::ResultTooLarge(out_dim, max_dim()));
        }
        let w = reflect_ancilla_zero(qb.unitary().unwrap(), qb.system_dim());
        let mut wk = ComplexMatrix::identity(w.rows());
        for k in 0..=degree {
            if k > 0 {
                wk = wk.matmul(&w);
            }
            blocks.push(
                BlockEncoding::from_explicit(wk.clone(), 1.0, qb.ancillas(), 0.0, be.system_dim())
                    .with_epsilon(cheb_epsilon(be, k)),
            );
        }
    } else {
        let b = symmetrize(&be.block());
        let defect = be.block().hermiticity_defect()?;
        if defect > BLOCK_HERMITICITY_TOL {
            return Err(Error::BlockNotHermitian(defect));
        }
        let n = b.rows();
        let mut prev = ComplexMatrix::identity(n);
        let mut curr = b.clone();
        for k in 0..=degree {
            let tk = match k {
                0 => prev.clone(),
                1 => curr.clone(),
                _ => {
                    let next = b.matmul(&curr).scale_real(2.0).sub(&prev);
                    prev = curr.clone();
                    curr = next.clone();
                    next
                }
            };
            blocks.push(
                BlockEncoding::tracked(tk, 1.0, be.ancillas().max(1), cheb_epsilon(be, k)),
            );
        }
    }

    let mut weights = series.coeffs.clone();
    if beta_p < 1.0 {
        // Pad with an exact zero encoding so the combination is undivided.
        let pad = if be.is_explicit() {
            blockenc::zero_encoding(be.system_dim())
        } else {
            blockenc::zero_encoding(be.system_dim()).to_tracked()
        };
        blocks.push(pad);
        weights.push(Complex64::new(1.0 - beta_p, 0.0));
    }
    let combined = blockenc::lcu_sum(&blocks, &weights)?;
    let alpha_out = beta_p.max(1.0);
    let rescaled = if alpha_out > 1.0 { combined.rescaled(alpha_out) } else { combined };

    Ok(rescaled
        .with_epsilon_added(series.remainder_bound)
        .with_walk_apps(be.walk_apps() + u64::from(degree))
        .with_half_bound_flag(half_violated))
}

/// Independent oracle: `P(A)` through the eigendecomposition. Test machinery;
/// never on the encoding path.
pub fn apply_poly_oracle(a: &ComplexMatrix, series: &ChebyshevSeries) -> Result<ComplexMatrix> {
    let norm = matkernel::spectral_norm(a)?;
    if norm > 1.0 + 1e-9 {
        return Err(Error::NormTooLarge(norm));
    }
    matkernel::func_hermitian(a, |x| series.eval(x))
}
