//! Symmetric Suzuki product formulas.
//!
//! `S_2(lambda) = prod_i e^{H_i lambda/2} prod_{i reversed} e^{H_i lambda/2}`
//! with the five-factor recursion
//!
//! ```text
//! S_2k(lambda) = S_{2k-2}(p_k lambda)^2 S_{2k-2}((1-4 p_k) lambda) S_{2k-2}(p_k lambda)^2
//! p_k = (4 - 4^{1/(2k-1)})^{-1}
//! ```
//!
//! plus segmented evolution, nested-commutator error bounds, and the segment
//! count needed to hit a target error. The bound is inverted numerically
//! (doubling then bisection) rather than through its asymptotic form, so the
//! constants stay honest when the comparison harness plots cost against the
//! encoding route.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkernel::{expm_general, spectral_norm, ComplexMatrix};

/// Suzuki recursion coefficient `p_k = (4 - 4^{1/(2k-1)})^{-1}`, `k >= 2`.
pub fn p_coefficient(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::KTooSmall(k));
    }
    Ok(1.0 / (4.0 - 4.0f64.powf(1.0 / (2.0 * f64::from(k) - 1.0))))
}

/// Evaluation counts accumulated while building a product formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrotterStats {
    /// Leaf `S_2` evaluations (5^{k-1} per `S_2k` call).
    pub s2_evaluations: u64,
    /// Exponential-factor applications, counting each half-step of every
    /// leaf: `2m` per `S_2`.
    pub exp_factor_applications: u64,
}

impl TrotterStats {
    fn absorb(&mut self, other: TrotterStats) {
        self.s2_evaluations += other.s2_evaluations;
        self.exp_factor_applications += other.exp_factor_applications;
    }

    fn scaled(self, r: u64) -> TrotterStats {
        TrotterStats {
            s2_evaluations: self.s2_evaluations * r,
            exp_factor_applications: self.exp_factor_applications * r,
        }
    }
}

fn check_terms(h_list: &[ComplexMatrix]) -> Result<usize> {
    if h_list.is_empty() {
        return Err(Error::EmptyList);
    }
    let d = h_list[0].rows();
    for h in h_list {
        if h.rows() != d || h.cols() != d {
            return Err(Error::DimensionMismatch(h.rows(), d));
        }
        let defect = h.hermiticity_defect()?;
        if defect > 1e-10 {
            return Err(Error::NonHermitian(defect));
        }
    }
    Ok(d)
}

/// The symmetric second-order formula
/// `prod_{i=1..m} e^{H_i lambda/2} prod_{i=m..1} e^{H_i lambda/2}`.
pub fn s2(h_list: &[ComplexMatrix], lambda: Complex64) -> Result<ComplexMatrix> {
    Ok(s2_with_stats(h_list, lambda)?.0)
}

pub fn s2_with_stats(h_list: &[ComplexMatrix], lambda: Complex64) -> Result<(ComplexMatrix, TrotterStats)> {
    let d = check_terms(h_list)?;
    let halves: Vec<ComplexMatrix> = h_list
        .iter()
        .map(|h| expm_general(h, lambda * 0.5))
        .collect::<Result<_>>()?;
    let mut out = ComplexMatrix::identity(d);
    for e in &halves {
        out = out.matmul(e);
    }
    for e in halves.iter().rev() {
        out = out.matmul(e);
    }
    let stats = TrotterStats {
        s2_evaluations: 1,
        exp_factor_applications: 2 * h_list.len() as u64,
    };
    Ok((out, stats))
}

/// Order-`2k` symmetric formula by the five-factor recursion; `k = 1` is
/// `S_2`. The straightforward recursion is kept so the instrumented leaf
/// count is exactly `5^{k-1}`.
pub fn s2k(h_list: &[ComplexMatrix], lambda: Complex64, k: u32) -> Result<ComplexMatrix> {
    Ok(s2k_with_stats(h_list, lambda, k)?.0)
}

pub fn s2k_with_stats(
    h_list: &[ComplexMatrix],
    lambda: Complex64,
    k: u32,
) -> Result<(ComplexMatrix, TrotterStats)> {
    if k == 0 {
        return Err(Error::KTooSmall(0));
    }
    if k == 1 {
        return s2_with_stats(h_list, lambda);
    }
    let p = p_coefficient(k)?;
    let (outer, mut stats) = s2k_with_stats(h_list, lambda * p, k - 1)?;
    let (o2, st2) = s2k_with_stats(h_list, lambda * p, k - 1)?;
    let (middle, st3) = s2k_with_stats(h_list, lambda * (1.0 - 4.0 * p), k - 1)?;
    let (o4, st4) = s2k_with_stats(h_list, lambda * p, k - 1)?;
    let (o5, st5) = s2k_with_stats(h_list, lambda * p, k - 1)?;
    stats.absorb(st2);
    stats.absorb(st3);
    stats.absorb(st4);
    stats.absorb(st5);
    let m = outer.matmul(&o2).matmul(&middle).matmul(&o4).matmul(&o5);
    Ok((m, stats))
}

/// `S_2k(-it/r)^r`: the time interval `[0, t]` split into `r` segments.
/// Stats count applications, i.e. `r` copies of the segment's cost.
pub fn segmented_evolution(
    h_list: &[ComplexMatrix],
    t: f64,
    r: u64,
    k: u32,
) -> Result<ComplexMatrix> {
    Ok(segmented_evolution_with_stats(h_list, t, r, k)?.0)
}

pub fn segmented_evolution_with_stats(
    h_list: &[ComplexMatrix],
    t: f64,
    r: u64,
    k: u32,
) -> Result<(ComplexMatrix, TrotterStats)> {
    if r == 0 {
        return Err(Error::ArgumentOutOfRange("segment count r must be >= 1".into()));
    }
    let lambda = Complex64::new(0.0, -t / r as f64);
    let (segment, seg_stats) = s2k_with_stats(h_list, lambda, k)?;
    Ok((segment.pow(r), seg_stats.scaled(r)))
}

/// Sum over all `(p+1)`-tuples of spectral norms of right-nested commutators
/// `[H_{i_{p+1}}, [H_{i_p}, ... [H_{i_2}, H_{i_1}]...]]`; zero when the terms
/// commute. `p` in {1, 2}, `m <= 4` (the sum has `m^{p+1}` entries).
pub fn commutator_bound_alpha(h_list: &[ComplexMatrix], p: u32) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(Error::OrderUnsupported(p));
    }
    if h_list.len() > 4 {
        return Err(Error::TooManyTerms(h_list.len()));
    }
    check_terms(h_list)?;
    let m = h_list.len();
    let commutator = |a: &ComplexMatrix, b: &ComplexMatrix| a.matmul(b).sub(&b.matmul(a));
    let mut total = 0.0;
    match p {
        1 => {
            for i in 0..m {
                for j in 0..m {
                    total += spectral_norm(&commutator(&h_list[j], &h_list[i]))?;
                }
            }
        }
        2 => {
            for i in 0..m {
                for j in 0..m {
                    let inner = commutator(&h_list[j], &h_list[i]);
                    for outer in h_list {
                        total += spectral_norm(&commutator(outer, &inner))?;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(total)
}

/// The segmented error bound
/// `2 Gamma^{2k+1} t^{2k+1} alpha^{(2k)} / (r^{2k} (2k+1))`,
/// `Gamma = 2 * 5^{k-1}`, `p = 2k` throughout.
pub fn segment_error_bound(alpha_2k: f64, t: f64, r: u64, k: u32) -> f64 {
    let gamma = 2.0 * 5.0f64.powi(k as i32 - 1);
    let p1 = 2 * k + 1; // 2k + 1
    2.0 * gamma.powi(p1 as i32) * t.powi(p1 as i32) * alpha_2k
        / ((r as f64).powi(2 * k as i32) * f64::from(p1))
}

/// Smallest `r` whose evaluated bound is at most `delta`, plus the bound at
/// that `r`. The nested-commutator sum is computed for `k = 1`
/// (`alpha^{(2)}`); higher orders need a caller-supplied value.
pub fn required_segments(
    delta: f64,
    k: u32,
    t: f64,
    h_list: &[ComplexMatrix],
    alpha_override: Option<f64>,
) -> Result<(u64, f64)> {
    if delta <= 0.0 || delta.is_nan() {
        return Err(Error::ArgumentOutOfRange(format!("delta {delta} must be positive")));
    }
    if k == 0 {
        return Err(Error::KTooSmall(0));
    }
    let alpha = match alpha_override {
        Some(a) => a,
        None => {
            if k != 1 {
                return Err(Error::OrderUnsupported(2 * k));
            }
            commutator_bound_alpha(h_list, 2)?
        }
    };
    if alpha == 0.0 {
        return Ok((1, 0.0));
    }
    // Doubling then bisection on the monotone bound.
    let mut hi = 1u64;
    while segment_error_bound(alpha, t, hi, k) > delta {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::ArgumentOutOfRange(format!("segment count overflow for delta {delta}"))
        })?;
    }
    let mut lo = hi / 2; // bound(lo) > delta (or lo = 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if segment_error_bound(alpha, t, mid, k) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, segment_error_bound(alpha, t, hi, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::expm_evolution;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    fn xz_pair() -> Vec<ComplexMatrix> {
        vec![pauli_x().scale_real(0.3), pauli_z().scale_real(0.2)]
    }

    fn minus_i_tau(tau: f64) -> Complex64 {
        Complex64::new(0.0, -tau)
    }

    #[test]
    fn p_coefficient_values() {
        // Extended-precision evaluations of (4 - 4^{1/(2k-1)})^{-1}.
        assert!((p_coefficient(2).unwrap() - 0.41449077179437574).abs() <= 1e-12);
        assert!((p_coefficient(3).unwrap() - 0.373065827733272_8).abs() <= 1e-12);
        assert!(matches!(p_coefficient(1), Err(Error::KTooSmall(1))));
        // Coefficient bookkeeping: the five factors cover lambda exactly.
        for k in 2..=4 {
            let p = p_coefficient(k).unwrap();
            assert!((4.0 * p + (1.0 - 4.0 * p) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn s2_single_term_is_exact_exponential() {
        let h = vec![pauli_x().scale_real(0.3)];
        let lambda = minus_i_tau(0.7);
        let s = s2(&h, lambda).unwrap();
        let exact = expm_evolution(&h[0], 0.7).unwrap();
        assert!(s.max_abs_diff(&exact) <= 1e-12);
    }

    #[test]
    fn s2_exact_on_commuting_terms() {
        let h = vec![
            ComplexMatrix::diag_real(&[0.3, -0.1]),
            ComplexMatrix::diag_real(&[-0.2, 0.4]),
        ];
        let total = h[0].add(&h[1]);
        let s = s2(&h, minus_i_tau(0.9)).unwrap();
        let exact = expm_evolution(&total, 0.9).unwrap();
        assert!(s.max_abs_diff(&exact) <= 1e-10);
    }

    #[test]
    fn s2_local_error_is_third_order() {
        let h = xz_pair();
        let total = h[0].add(&h[1]);
        let tau = 0.1;
        let err = spectral_norm(
            &s2(&h, minus_i_tau(tau)).unwrap().sub(&expm_evolution(&total, tau).unwrap()),
        )
        .unwrap();
        assert!(err <= 1e-4, "error {err} too large for tau^3 scaling");
        assert!(err >= 1e-8, "error {err} suspiciously small");
    }

    #[test]
    fn s2_is_unitary_for_imaginary_lambda() {
        let s = s2(&xz_pair(), minus_i_tau(0.4)).unwrap();
        assert!(s.unitarity_defect().unwrap() <= 1e-9);
    }

    #[test]
    fn s2_time_reversal() {
        let h = xz_pair();
        let lambda = minus_i_tau(0.37);
        let fwd = s2(&h, lambda).unwrap();
        let bwd = s2(&h, -lambda).unwrap();
        assert!(fwd.matmul(&bwd).max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-10);
    }

    #[test]
    fn s2k_commuting_exact_any_order() {
        let h = vec![
            ComplexMatrix::diag_real(&[0.3, -0.1, 0.2, 0.0]),
            ComplexMatrix::diag_real(&[-0.2, 0.4, 0.1, -0.3]),
        ];
        let total = h[0].add(&h[1]);
        for k in 1..=3 {
            let s = s2k(&h, minus_i_tau(0.8), k).unwrap();
            let exact = expm_evolution(&total, 0.8).unwrap();
            assert!(s.max_abs_diff(&exact) <= 1e-10, "order k = {k}");
        }
    }

    #[test]
    fn s2k_fifth_order_richardson_ratio() {
        let h = xz_pair();
        let total = h[0].add(&h[1]);
        let err = |tau: f64| {
            spectral_norm(
                &s2k(&h, minus_i_tau(tau), 2)
                    .unwrap()
                    .sub(&expm_evolution(&total, tau).unwrap()),
            )
            .unwrap()
        };
        let ratio = err(0.2) / err(0.1);
        // Local error O(tau^5): halving tau divides the error by ~32.
        assert!((ratio - 32.0).abs() <= 0.4 * 32.0, "ratio {ratio}");
    }

    #[test]
    fn s2k_unitarity_and_leaf_count() {
        let (s, stats) = s2k_with_stats(&xz_pair(), minus_i_tau(0.3), 2).unwrap();
        assert!(s.unitarity_defect().unwrap() <= 1e-9);
        assert_eq!(stats.s2_evaluations, 5);
        assert_eq!(stats.exp_factor_applications, 5 * 4);
        let (s3, stats3) = s2k_with_stats(&xz_pair(), minus_i_tau(0.3), 3).unwrap();
        assert!(s3.unitarity_defect().unwrap() <= 1e-9);
        assert_eq!(stats3.s2_evaluations, 25);
    }

    #[test]
    fn segmented_r1_equals_single_formula() {
        let h = xz_pair();
        let direct = s2k(&h, minus_i_tau(1.0), 1).unwrap();
        let seg = segmented_evolution(&h, 1.0, 1, 1).unwrap();
        assert!(direct.max_abs_diff(&seg) <= 1e-12);
    }

    #[test]
    fn segmented_commuting_exact_for_any_r() {
        let h = vec![
            ComplexMatrix::diag_real(&[0.3, -0.1]),
            ComplexMatrix::diag_real(&[-0.2, 0.4]),
        ];
        let total = h[0].add(&h[1]);
        for r in [1u64, 2, 5, 16] {
            for k in 1..=2 {
                let seg = segmented_evolution(&h, 1.3, r, k).unwrap();
                let exact = expm_evolution(&total, 1.3).unwrap();
                assert!(seg.max_abs_diff(&exact) <= 1e-10, "r = {r}, k = {k}");
            }
        }
    }

    #[test]
    fn segmented_error_slope_near_minus_two() {
        let h = xz_pair();
        let total = h[0].add(&h[1]);
        let exact = expm_evolution(&total, 1.0).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut last_err = f64::INFINITY;
        for exp in 0..7u32 {
            let r = 1u64 << exp;
            let err = spectral_norm(&segmented_evolution(&h, 1.0, r, 1).unwrap().sub(&exact)).unwrap();
            assert!(err <= last_err + 1e-15, "error must fall as r doubles");
            last_err = err;
            xs.push((r as f64).ln());
            ys.push(err.ln());
        }
        let fit = crate::stats::linear_fit(&xs, &ys);
        assert!(
            (-2.4..=-1.6).contains(&fit.slope),
            "log-log slope {} outside [-2.4, -1.6]",
            fit.slope
        );
    }

    #[test]
    fn commutator_bound_zero_for_commuting() {
        let h = vec![
            ComplexMatrix::diag_real(&[0.3, -0.1]),
            ComplexMatrix::diag_real(&[-0.2, 0.4]),
        ];
        for p in 1..=2 {
            assert!(commutator_bound_alpha(&h, p).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn commutator_bound_pauli_pair() {
        // [aX, bZ] = -2iab Y has norm 2ab; ordered pairs (1,2) and (2,1)
        // contribute, diagonal pairs vanish: total 4ab.
        let (a, b) = (0.3, 0.2);
        let h = vec![pauli_x().scale_real(a), pauli_z().scale_real(b)];
        let total = commutator_bound_alpha(&h, 1).unwrap();
        assert!((total - 4.0 * a * b).abs() <= 1e-10, "got {total}");
    }

    #[test]
    fn commutator_bound_is_multilinear_in_scale() {
        let h = xz_pair();
        for p in 1..=2u32 {
            let base = commutator_bound_alpha(&h, p).unwrap();
            let scaled: Vec<ComplexMatrix> = h.iter().map(|x| x.scale_real(1.7)).collect();
            let big = commutator_bound_alpha(&scaled, p).unwrap();
            assert!((big - 1.7f64.powi(p as i32 + 1) * base).abs() <= 1e-10);
        }
    }

    #[test]
    fn commutator_bound_guards() {
        let h = vec![pauli_x(); 5];
        assert!(matches!(commutator_bound_alpha(&h, 1), Err(Error::TooManyTerms(5))));
        assert!(matches!(commutator_bound_alpha(&xz_pair(), 3), Err(Error::OrderUnsupported(3))));
    }

    #[test]
    fn required_segments_commuting_is_one() {
        let h = vec![
            ComplexMatrix::diag_real(&[0.3, -0.1]),
            ComplexMatrix::diag_real(&[-0.2, 0.4]),
        ];
        let (r, bound) = required_segments(1e-8, 1, 1.0, &h, None).unwrap();
        assert_eq!(r, 1);
        assert_eq!(bound, 0.0);
    }

    #[test]
    fn required_segments_monotone_staircase() {
        let h = xz_pair();
        let mut last = 0u64;
        for &delta in &[1e-2, 5e-3, 2.5e-3, 1.25e-3] {
            let (r, bound) = required_segments(delta, 1, 1.0, &h, None).unwrap();
            assert!(bound <= delta);
            assert!(r >= last, "r must not shrink as delta tightens");
            // Halving delta grows r by at most ceil(2^{1/2}) relative.
            if last > 0 {
                assert!(r as f64 <= (last as f64) * 2f64.sqrt() + 1.0);
            }
            last = r;
        }
    }

    #[test]
    fn required_segments_bound_verified_empirically() {
        let h = xz_pair();
        let total = h[0].add(&h[1]);
        let delta = 1e-4;
        let (r, bound) = required_segments(delta, 1, 1.0, &h, None).unwrap();
        assert!(bound <= delta);
        // The bound at r - 1 must exceed delta (minimality).
        if r > 1 {
            let alpha = commutator_bound_alpha(&h, 2).unwrap();
            assert!(segment_error_bound(alpha, 1.0, r - 1, 1) > delta);
        }
        let measured = spectral_norm(
            &segmented_evolution(&h, 1.0, r, 1).unwrap().sub(&expm_evolution(&total, 1.0).unwrap()),
        )
        .unwrap();
        assert!(measured <= delta, "measured {measured} above target {delta}");
    }

    #[test]
    fn required_segments_higher_order_needs_override() {
        let h = xz_pair();
        assert!(matches!(
            required_segments(1e-4, 2, 1.0, &h, None),
            Err(Error::OrderUnsupported(4))
        ));
        let (r, bound) = required_segments(1e-4, 2, 1.0, &h, Some(0.05)).unwrap();
        assert!(r >= 1);
        assert!(bound <= 1e-4);
    }
}
