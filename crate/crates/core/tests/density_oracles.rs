//! Catalog values against independent oracles: closed forms, composite
//! Simpson sums and pure bisection.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rmt_core::densities::*;
use rmt_core::ensembles::RajanAbbottParams;

/// Composite Simpson rule with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn ra(f_e: f64, se: f64, si: f64) -> RajanAbbottParams {
    RajanAbbottParams::new(f_e, se, si).unwrap()
}

#[test]
fn diffusion_constant_at_unit_time() {
    let d = SpiricDensity::new(1.0).unwrap();
    assert!((d.norm_const() - 0.6105).abs() <= 5e-4);
    let s3 = 3f64.sqrt();
    let mass = simpson(|x| rho_c_spiric(Complex64::new(x, 0.0), 1.0).sqrt(), -s3, s3, 200_000);
    assert!((d.norm_const() - 1.0 / mass).abs() < 1e-6);
}

#[test]
fn diffusion_support_for_several_times() {
    for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let d = SpiricDensity::new(t).unwrap();
        let mut mass = 0.0;
        for &(a, b) in &d.support().intervals {
            mass += simpson(|x| d.rho_r(x), a, b, 100_000);
            // Just outside every end the density vanishes.
            assert_eq!(d.rho_r(b + 1e-9), 0.0);
            assert_eq!(d.rho_r(a - 1e-9), 0.0);
        }
        assert!((mass - 1.0).abs() < 1e-6, "t={t}: {mass}");
    }
}

#[test]
fn spherical_cdf_closed_form() {
    for k in 1..=3usize {
        let p = Prediction::SphericalProduct { k };
        for x in [-50.0f64, -2.0, -0.2, 0.001, 0.7, 9.0] {
            let want = 0.5 + x.signum() * x.abs().powf(1.0 / k as f64).atan() / PI;
            assert!((p.cdf(x).unwrap() - want).abs() < 1e-8, "k={k} x={x}");
        }
    }
}

#[test]
fn regular_graph_cdf_closed_form() {
    for k in 2..=4usize {
        let p = Prediction::RegularGraph { k };
        let kf = k as f64;
        let anti = |x: f64| 0.5 * ((kf + x) / (kf - x)).ln();
        for x in [-1.2, 0.0, 0.9, 1.4] {
            let want = (anti(x) - anti(-kf.sqrt())) / regular_graph_log_mass(k);
            assert!((p.cdf(x).unwrap() - want).abs() < 1e-10);
        }
    }
}

#[test]
fn rajan_abbott_against_oracles() {
    let p = ra(0.8, 0.15, 0.9);
    let bisect = |r: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g = 1.0 - mid;
            let v = 0.8 * 0.0225 / (r * r + 0.0225 * g) + 0.2 * 0.81 / (r * r + 0.81 * g) - 1.0;
            if v < 0.0 { lo = mid } else { hi = mid }
        }
        0.5 * (lo + hi)
    };
    for r in [0.01, 0.1, 0.3, 0.42] {
        assert!((solve_radial_cdf_ra(&p, r).unwrap() - bisect(r)).abs() < 1e-10);
    }
    // F(r) = 2π∫₀ʳ ρ^c(s)s ds.
    for r in [0.1, 0.25, 0.4] {
        let f = 2.0 * PI * simpson(|s| rho_c_rajan_abbott(&p, s).unwrap() * s, 0.0, r, 20_000);
        assert!((f - bisect(r)).abs() < 1e-8);
    }
}

proptest! {
    #[test]
    fn closed_form_ratio_is_constant(k in 1usize..6, x in 1e-3f64..1e3) {
        let p = Prediction::SphericalProduct { k };
        let ratio = p.rho_r(x).to_f64() / p.rho_c_axis(x).to_f64().sqrt();
        prop_assert!((ratio / p.norm_const() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn graph_ratio_is_constant(k in 2usize..8, u in -0.999f64..0.999) {
        let p = Prediction::RegularGraph { k };
        let x = u * (k as f64).sqrt();
        let ratio = p.rho_r(x).to_f64() / p.rho_c_axis(x).to_f64().sqrt();
        prop_assert!((ratio / p.norm_const() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn densities_are_nonnegative_and_supported(x in -10.0f64..10.0, y in -10.0f64..10.0, t in 0.05f64..4.0, k in 2usize..6) {
        let z = Complex64::new(x, y);
        prop_assert!(rho_c_spiric(z, t) >= 0.0);
        let g = rho_c_regular_graph(z, k);
        prop_assert!(g >= 0.0);
        if z.norm_sqr() > k as f64 * (1.0 + 1e-12) { prop_assert_eq!(g, 0.0); }
        prop_assert!(rho_c_ginibre(z) >= 0.0);
        if let DensityValue::Finite(v) = rho_c_spherical_product(z, k) { prop_assert!(v >= 0.0); }
        if !spiric_support(t).contains(x) { prop_assert_eq!(rho_c_spiric(Complex64::new(x, 0.0), t), 0.0); }
    }

    #[test]
    fn single_population_is_circular(f_e in 0.05f64..0.95, sigma in 0.1f64..3.0, u in 0.0f64..0.999) {
        let p = ra(f_e, sigma, sigma);
        let v = rho_c_rajan_abbott(&p, u * sigma).unwrap();
        prop_assert!((v * PI * sigma * sigma - 1.0).abs() < 1e-10);
    }

    #[test]
    fn radial_cdf_is_monotone(f_e in 0.05f64..0.95, se in 0.05f64..2.0, si in 0.05f64..2.0) {
        let c = radial_cdf_ra(&ra(f_e, se, si), 33).unwrap();
        prop_assert_eq!(c.values[0], 0.0);
        prop_assert!((c.values[32] - 1.0).abs() < 1e-10);
        prop_assert!(c.values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }
}
