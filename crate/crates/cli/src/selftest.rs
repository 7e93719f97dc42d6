//! Built-in invariant suite: one quick check per subsystem, runnable in the
//! field without the development test harness.

use hamsim_core::blockenc::{self, encode_hermitian, verify};
use hamsim_core::hamlib::{self, HamiltonianSum, PauliTerm};
use hamsim_core::matkernel::{
    eig_hermitian, expm_evolution, random_hermitian, spectral_norm, ComplexMatrix,
};
use hamsim_core::pipeline::{self, ExecutionMode};
use hamsim_core::rng::SplitMix64;
use hamsim_core::{jacobi_anger, qet, trotter, unitary_log};
use num_complex::Complex64;

type Check = (&'static str, fn(u64) -> Result<(), String>);

fn err<T: std::fmt::Display>(e: T) -> String {
    e.to_string()
}

fn kernel_eigen_reconstruction(seed: u64) -> Result<(), String> {
    let a = random_hermitian(6, &mut SplitMix64::new(seed));
    let eig = eig_hermitian(&a).map_err(err)?;
    let residual = spectral_norm(&eig.reconstruct().sub(&a)).map_err(err)?;
    if residual > 1e-10 {
        return Err(format!("reconstruction residual {residual}"));
    }
    Ok(())
}

fn kernel_group_law(seed: u64) -> Result<(), String> {
    let h = random_hermitian(4, &mut SplitMix64::new(seed ^ 0xA5));
    let lhs = expm_evolution(&h, 0.4).map_err(err)?.matmul(&expm_evolution(&h, 0.9).map_err(err)?);
    let rhs = expm_evolution(&h, 1.3).map_err(err)?;
    let gap = spectral_norm(&lhs.sub(&rhs)).map_err(err)?;
    if gap > 1e-9 {
        return Err(format!("group-law gap {gap}"));
    }
    Ok(())
}

fn blockenc_oracle_equivalence(seed: u64) -> Result<(), String> {
    let mut rng = SplitMix64::new(seed ^ 0xB7);
    let mk = |rng: &mut SplitMix64| {
        let g = random_hermitian(2, rng);
        let norm = spectral_norm(&g).unwrap();
        let a = g.scale_real(0.4 / norm);
        (encode_hermitian(&a).unwrap(), a)
    };
    let (be1, a1) = mk(&mut rng);
    let (be2, a2) = mk(&mut rng);
    let w = [Complex64::new(0.8, 0.0), Complex64::new(-0.5, 0.3)];
    let beta: f64 = w.iter().map(|x| x.norm()).sum();
    let sum = blockenc::lcu_sum(&[be1.clone(), be2.clone()], &w).map_err(err)?;
    let direct = a1.scale(w[0] / beta).add(&a2.scale(w[1] / beta));
    let d1 = verify(&sum, &direct).map_err(err)?;
    let prod = blockenc::product(&be1, &be2).map_err(err)?;
    let d2 = verify(&prod, &a1.matmul(&a2)).map_err(err)?;
    if d1 > 1e-10 || d2 > 1e-10 {
        return Err(format!("lcu defect {d1}, product defect {d2}"));
    }
    Ok(())
}

fn chebyshev_block_oracle(seed: u64) -> Result<(), String> {
    let g = random_hermitian(2, &mut SplitMix64::new(seed ^ 0xC1));
    let a = g.scale_real(0.5 / spectral_norm(&g).map_err(err)?);
    let be = encode_hermitian(&a).map_err(err)?;
    let t3 = qet::chebyshev_block(&be, 3).map_err(err)?;
    let oracle = hamsim_core::matkernel::func_hermitian(&a, |x| {
        Complex64::new(4.0 * x * x * x - 3.0 * x, 0.0)
    })
    .map_err(err)?;
    let gap = t3.block().max_abs_diff(&oracle);
    if gap > 1e-9 {
        return Err(format!("T_3 block off by {gap}"));
    }
    Ok(())
}

fn unitary_log_round_trip(seed: u64) -> Result<(), String> {
    let g = random_hermitian(2, &mut SplitMix64::new(seed ^ 0xD3));
    let h = g.scale_real(0.5 / spectral_norm(&g).map_err(err)?);
    let u = expm_evolution(&h, 1.0).map_err(err)?;
    let be = unitary_log::log_of_unitary_in(&u, 1e-6, false).map_err(err)?;
    let defect = verify(&be, &h).map_err(err)?;
    if defect > 1e-6 {
        return Err(format!("recovery defect {defect}"));
    }
    Ok(())
}

fn bessel_normalization(_seed: u64) -> Result<(), String> {
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        let mut sum = jacobi_anger::bessel_j(0, t).map_err(err)?.powi(2);
        for k in 1..=60 {
            sum += 2.0 * jacobi_anger::bessel_j(k, t).map_err(err)?.powi(2);
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(format!("sum rule off by {} at t = {t}", (sum - 1.0).abs()));
        }
    }
    Ok(())
}

fn evolution_series_certificate(_seed: u64) -> Result<(), String> {
    let s = jacobi_anger::evolution_series(1.0, 1e-8).map_err(err)?;
    let worst = qet::guard_grid()
        .iter()
        .map(|&x| (s.eval(x) - Complex64::from_polar(1.0, -x)).norm())
        .fold(0.0, f64::max);
    if worst > s.remainder_bound {
        return Err(format!("uniform error {worst} above certificate {}", s.remainder_bound));
    }
    Ok(())
}

fn trotter_commuting_exact(_seed: u64) -> Result<(), String> {
    let terms = vec![
        ComplexMatrix::diag_real(&[0.3, -0.1]),
        ComplexMatrix::diag_real(&[-0.2, 0.4]),
    ];
    let total = terms[0].add(&terms[1]);
    let approx = trotter::segmented_evolution(&terms, 1.0, 3, 2).map_err(err)?;
    let exact = expm_evolution(&total, 1.0).map_err(err)?;
    let gap = approx.max_abs_diff(&exact);
    if gap > 1e-10 {
        return Err(format!("commuting case off by {gap}"));
    }
    Ok(())
}

fn budget_forward_check(_seed: u64) -> Result<(), String> {
    for &(delta, t, m) in &[(1e-2, 1.0, 1usize), (1e-4, 2.0, 3)] {
        let eps = pipeline::epsilon_budget(delta, t, m).map_err(err)?;
        let lhs = pipeline::budget_forward_check(eps, t, m);
        if (lhs - delta).abs() > 1e-4 * delta {
            return Err(format!("forward check {lhs} vs {delta}"));
        }
    }
    Ok(())
}

fn end_to_end_single_factor(_seed: u64) -> Result<(), String> {
    let h = hamlib::pauli_term_to_matrix(&PauliTerm::new("Z", 0.4)).map_err(err)?;
    let ham = HamiltonianSum::from_terms(1, vec![h], true).map_err(err)?;
    let (_, rep) = pipeline::simulate(&ham, 1.0, 1e-3, ExecutionMode::BlockTracked).map_err(err)?;
    if rep.measured_error > 1e-3 {
        return Err(format!("measured error {}", rep.measured_error));
    }
    if rep.measured_error > rep.certified_error + 1e-9 {
        return Err("certificate under-promised".into());
    }
    Ok(())
}

fn end_to_end_random_pair(seed: u64) -> Result<(), String> {
    let ham = hamlib::random_decomposed_hamiltonian(1, 2, 0.4, seed).map_err(err)?;
    let (_, rep) = pipeline::simulate(&ham, 1.0, 1e-4, ExecutionMode::BlockTracked).map_err(err)?;
    if rep.measured_error > 1e-4 {
        return Err(format!("measured error {}", rep.measured_error));
    }
    Ok(())
}

pub const CHECKS: &[Check] = &[
    ("kernel_eigen_reconstruction", kernel_eigen_reconstruction),
    ("kernel_group_law", kernel_group_law),
    ("blockenc_oracle_equivalence", blockenc_oracle_equivalence),
    ("chebyshev_block_oracle", chebyshev_block_oracle),
    ("unitary_log_round_trip", unitary_log_round_trip),
    ("bessel_normalization", bessel_normalization),
    ("evolution_series_certificate", evolution_series_certificate),
    ("trotter_commuting_exact", trotter_commuting_exact),
    ("budget_forward_check", budget_forward_check),
    ("end_to_end_single_factor", end_to_end_single_factor),
    ("end_to_end_random_pair", end_to_end_random_pair),
];

/// Run every check; returns (passed, failed).
pub fn run(seed: u64) -> (usize, usize) {
    let mut passed = 0;
    let mut failed = 0;
    for (name, check) in CHECKS {
        match check(seed) {
            Ok(()) => {
                println!("ok   {name}");
                passed += 1;
            }
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed += 1;
            }
        }
    }
    println!("selftest: {passed} passed, {failed} failed");
    (passed, failed)
}
