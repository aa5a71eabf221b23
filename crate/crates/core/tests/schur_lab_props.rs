use num_complex::Complex64;
use proptest::prelude::*;
use rmt_core::ensembles::sample_ginibre;
use rmt_core::schur_lab::{
    jacobian_complex_pair, jacobian_real_pair, partial_schur_complex_pair, partial_schur_real_pair,
    real_shifted_determinant,
};
use rmt_core::{compute_spectrum, RealMatrix, RngStream};

fn random(n: usize, seed: u64) -> RealMatrix {
    sample_ginibre(n, &mut RngStream::new(seed, 0).rng())
}

/// Greedy nearest matching of two eigenvalue multisets; returns the worst gap.
fn multiset_gap(mut a: Vec<Complex64>, b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut worst = 0.0f64;
    for z in b {
        let (idx, d) = a
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        a.swap_remove(idx);
    }
    worst
}

fn eigs(x: &RealMatrix) -> Vec<Complex64> {
    compute_spectrum(x).unwrap().spectrum.eigenvalues().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn real_pair_invariants(seed in any::<u64>(), n in 3usize..=12) {
        let x = random(n, seed);
        let spec = compute_spectrum(&x).unwrap().spectrum;
        prop_assume!(spec.real_eigs().len() >= 2);
        let (l1, l2) = (spec.real_eigs()[0], spec.real_eigs()[1]);
        let d = partial_schur_real_pair(&x, l1, l2).unwrap();
        let norm = x.frobenius_norm();
        prop_assert!(x.sub(&d.reconstruct()).frobenius_norm() <= 1e-12 * norm);
        prop_assert!(d.o.orthogonality_defect() <= 1e-12);
        prop_assert!((d.x1 - l1).abs() < 1e-8 && (d.x2 - l2).abs() < 1e-8);
        let mut blocks = eigs(&d.y1);
        blocks.push(Complex64::new(d.x1, 0.0));
        blocks.push(Complex64::new(d.x2, 0.0));
        prop_assert!(multiset_gap(blocks, &eigs(&x)) < 1e-8);
    }

    #[test]
    fn complex_pair_invariants(seed in any::<u64>(), n in 2usize..=12) {
        let x = random(n, seed);
        let spec = compute_spectrum(&x).unwrap().spectrum;
        prop_assume!(!spec.complex_pairs().is_empty());
        let (re, im) = spec.complex_pairs()[0];
        let d = partial_schur_complex_pair(&x, re, im).unwrap();
        let norm = x.frobenius_norm();
        prop_assert!(x.sub(&d.reconstruct()).frobenius_norm() <= 1e-12 * norm);
        prop_assert!(d.o.orthogonality_defect() <= 1e-12);
        prop_assert!(d.pair_relation_error() <= 1e-10);
        prop_assert!(d.b >= d.c && d.c > 0.0);
        prop_assert!((d.eta - (d.b - d.c)).abs() == 0.0);
        let mut blocks = eigs(&d.y2);
        blocks.push(Complex64::new(d.x, d.y));
        blocks.push(Complex64::new(d.x, -d.y));
        prop_assert!(multiset_gap(blocks, &eigs(&x)) < 1e-8);
    }

    #[test]
    fn noisy_claims_are_accepted(seed in any::<u64>(), noise in -1e-9f64..1e-9) {
        let x = random(8, seed);
        let spec = compute_spectrum(&x).unwrap().spectrum;
        if let Some(&(re, im)) = spec.complex_pairs().first() {
            let d = partial_schur_complex_pair(&x, re + noise, im - noise).unwrap();
            prop_assert!(x.sub(&d.reconstruct()).frobenius_norm() <= 1e-12 * x.frobenius_norm());
        }
    }

    #[test]
    fn jacobian_real_pair_is_symmetric(seed in any::<u64>(), x1 in -2.0f64..2.0, x2 in -2.0f64..2.0) {
        let y = random(4, seed);
        prop_assert_eq!(jacobian_real_pair(x1, x2, &y), jacobian_real_pair(x2, x1, &y));
        prop_assert_eq!(jacobian_real_pair(x1, x1, &y), 0.0);
    }

    #[test]
    fn complex_jacobian_degenerates_onto_real_axis(seed in any::<u64>(), x in -2.0f64..2.0, eta in -3.0f64..3.0) {
        let y = random(5, seed);
        prop_assert_eq!(jacobian_complex_pair(x, 0.0, eta, &y), 0.0);
        prop_assert_eq!(jacobian_complex_pair(x, 0.7, 0.0, &y), 0.0);
        let det = real_shifted_determinant(&y, x);
        prop_assert_eq!(y.shifted_determinant(Complex64::new(x, 0.0)).norm_sqr(), det * det);
        // The prefactor vanishes linearly in y.
        let small = jacobian_complex_pair(x, 1e-9, eta, &y);
        let prefactor = 2.0 * (eta * 1e-9).abs() / (eta * eta + 4e-18).sqrt();
        prop_assert!((small - prefactor * det * det).abs() <= 1e-6 * (prefactor * det * det).abs() + 1e-300);
    }
}

#[test]
fn larger_matrices_reconstruct() {
    for seed in 0..5 {
        let x = random(64, seed);
        let spec = compute_spectrum(&x).unwrap().spectrum;
        let norm = x.frobenius_norm();
        if spec.real_eigs().len() >= 2 {
            let d = partial_schur_real_pair(&x, spec.real_eigs()[0], spec.real_eigs()[1]).unwrap();
            assert!(x.sub(&d.reconstruct()).frobenius_norm() <= 1e-12 * norm);
        }
        let (re, im) = spec.complex_pairs()[0];
        let d = partial_schur_complex_pair(&x, re, im).unwrap();
        assert!(x.sub(&d.reconstruct()).frobenius_norm() <= 1e-12 * norm);
        assert!(d.o.orthogonality_defect() <= 1e-12);
    }
}
