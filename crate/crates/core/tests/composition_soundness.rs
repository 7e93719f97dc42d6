//! Metadata soundness of the encoding algebra: over many random composition
//! trees, the measured defect against the tracked target operator never
//! exceeds the composed epsilon, and every explicit dilation stays unitary.

use hamsim_core::blockenc::{
    self, encode_hermitian, lcu_sum, product, tensor, verify, BlockEncoding,
};
use hamsim_core::matkernel::{kron, random_hermitian, spectral_norm, ComplexMatrix};
use hamsim_core::rng::SplitMix64;
use num_complex::Complex64;

/// An encoding paired with the operator it claims to encode.
struct Claimed {
    be: BlockEncoding,
    target: ComplexMatrix,
}

/// Exact or noisy leaf on a 2-dimensional system: the dilation encodes a
/// perturbed operator exactly, the declared target keeps the perturbation
/// inside epsilon.
fn leaf(rng: &mut SplitMix64) -> Claimed {
    let g = random_hermitian(2, rng);
    let a = g.scale_real(0.45 / spectral_norm(&g).unwrap());
    if rng.next_f64() < 0.5 {
        Claimed { be: encode_hermitian(&a).unwrap(), target: a }
    } else {
        let noise_raw = random_hermitian(2, rng);
        let eta = 1e-5 * rng.next_f64();
        let noise = noise_raw.scale_real(eta / spectral_norm(&noise_raw).unwrap());
        let be = encode_hermitian(&a.add(&noise)).unwrap().with_declared_epsilon(eta + 1e-12);
        Claimed { be, target: a }
    }
}

fn weight(rng: &mut SplitMix64) -> Complex64 {
    Complex64::from_polar(0.2 + rng.next_f64(), 2.0 * std::f64::consts::PI * rng.next_f64())
}

/// Dimension-preserving composition: linear combinations and products only.
fn compose(rng: &mut SplitMix64, depth: u32) -> Claimed {
    if depth == 0 {
        return leaf(rng);
    }
    if rng.next_u64().is_multiple_of(2) {
        let n = 2 + (rng.next_u64() % 2) as usize;
        let parts: Vec<Claimed> = (0..n).map(|_| compose(rng, depth - 1)).collect();
        let weights: Vec<Complex64> = (0..n).map(|_| weight(rng)).collect();
        let beta: f64 = weights.iter().map(|w| w.norm()).sum();
        let bes: Vec<BlockEncoding> = parts.iter().map(|p| p.be.clone()).collect();
        let be = lcu_sum(&bes, &weights).unwrap();
        let mut target = ComplexMatrix::zeros(2, 2);
        for (p, w) in parts.iter().zip(&weights) {
            target = target.add(&p.target.scale(w / (beta * p.be.alpha())));
        }
        Claimed { be, target }
    } else {
        let a = compose(rng, depth - 1);
        let b = compose(rng, depth - 1);
        Claimed {
            be: product(&a.be, &b.be).unwrap(),
            target: a.target.matmul(&b.target),
        }
    }
}

#[test]
fn measured_defect_within_tracked_epsilon_over_100_seeds() {
    for seed in 0..100u64 {
        let mut rng = SplitMix64::new(seed);
        let depth = 1 + (rng.next_u64() % 2) as u32;
        let base = compose(&mut rng, depth);
        // A quarter of the trees get a tensor factor stacked on the root.
        let claimed = if rng.next_u64().is_multiple_of(4) {
            let extra = leaf(&mut rng);
            Claimed {
                be: tensor(&[base.be, extra.be]).unwrap(),
                target: kron(&base.target, &extra.target).unwrap(),
            }
        } else {
            base
        };
        let defect = verify(&claimed.be, &claimed.target).unwrap();
        assert!(
            defect <= claimed.be.epsilon() + 1e-9,
            "seed {seed}: defect {defect} above certificate {}",
            claimed.be.epsilon()
        );
        if let Some(u) = claimed.be.unitary() {
            let du = u.unitarity_defect().unwrap();
            assert!(du <= 1e-10, "seed {seed}: dilation unitarity {du}");
        }
    }
}

#[test]
fn exact_compositions_match_direct_arithmetic() {
    // With exact leaves the composed defect is pure rounding.
    for seed in 100..140u64 {
        let mut rng = SplitMix64::new(seed);
        let mk = |rng: &mut SplitMix64| {
            let g = random_hermitian(2, rng);
            let a = g.scale_real(0.5 / spectral_norm(&g).unwrap());
            (encode_hermitian(&a).unwrap(), a)
        };
        let (be1, a1) = mk(&mut rng);
        let (be2, a2) = mk(&mut rng);
        let w = [weight(&mut rng), weight(&mut rng)];
        let beta: f64 = w.iter().map(|x| x.norm()).sum();

        let sum = lcu_sum(&[be1.clone(), be2.clone()], &w).unwrap();
        let sum_direct = a1.scale(w[0] / beta).add(&a2.scale(w[1] / beta));
        assert!(verify(&sum, &sum_direct).unwrap() <= 1e-10, "seed {seed} lcu");

        let prod = product(&be1, &be2).unwrap();
        assert!(verify(&prod, &a1.matmul(&a2)).unwrap() <= 1e-10, "seed {seed} product");

        let tens = tensor(&[be1, be2]).unwrap();
        assert!(verify(&tens, &kron(&a1, &a2).unwrap()).unwrap() <= 1e-10, "seed {seed} tensor");
    }
}

#[test]
fn zero_encoding_composes_soundly() {
    let z = blockenc::zero_encoding(2);
    let a = {
        let g = random_hermitian(2, &mut SplitMix64::new(7));
        g.scale_real(0.3 / spectral_norm(&g).unwrap())
    };
    let be = encode_hermitian(&a).unwrap();
    let w = [Complex64::new(0.7, 0.0), Complex64::new(0.3, 0.0)];
    let combined = lcu_sum(&[be, z], &w).unwrap();
    assert!(verify(&combined, &a.scale_real(0.7)).unwrap() <= 1e-10);
}
