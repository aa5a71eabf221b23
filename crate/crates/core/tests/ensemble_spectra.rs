//! Spectral checks of the samplers at moderate sizes.

use rmt_core::densities::{DensityModel, Prediction};
use rmt_core::ensembles::{DiffusionParams, GraphParams, RajanAbbottParams};
use rmt_core::{compute_spectrum, EnsembleKind, EnsembleSpec, RngStream, Spectrum};

fn spectra(kind: EnsembleKind, n: usize, trials: u64, seed: u64) -> Vec<Spectrum> {
    let spec = EnsembleSpec::new(kind, n).unwrap();
    (0..trials).map(|t| compute_spectrum(&spec.sample(RngStream::new(seed, t)).unwrap()).unwrap().spectrum).collect()
}

#[test]
fn ginibre_radius_near_one() {
    for s in spectra(EnsembleKind::Ginibre, 1000, 3, 1) {
        let r = s.spectral_radius();
        assert!((0.95..=1.10).contains(&r), "{r}");
    }
}

#[test]
fn spherical_half_of_complex_mass_in_unit_disk() {
    let all = spectra(EnsembleKind::SphericalProduct { k: 1 }, 300, 4, 2);
    let (mut inside, mut total) = (0usize, 0usize);
    for s in &all {
        for &(x, y) in s.complex_pairs() {
            total += 1;
            inside += usize::from(x * x + y * y <= 1.0);
        }
    }
    let frac = inside as f64 / total as f64;
    assert!((frac - 0.5).abs() < 0.05, "{frac}");
}

#[test]
fn spherical_real_eigenvalues_look_cauchy() {
    let mut reals: Vec<f64> = spectra(EnsembleKind::SphericalProduct { k: 1 }, 200, 30, 3)
        .iter()
        .flat_map(|s| s.real_eigs().to_vec())
        .collect();
    reals.sort_by(f64::total_cmp);
    let m = reals.len() as f64;
    let ks = reals
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 0.5 + x.atan() / std::f64::consts::PI;
            (f - i as f64 / m).abs().max((f - (i + 1) as f64 / m).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.05, "{ks}");
}

#[test]
fn rajan_abbott_radius() {
    let p = RajanAbbottParams::new(0.8, 0.15, 0.9).unwrap();
    for s in spectra(EnsembleKind::RajanAbbott(p), 1000, 2, 4) {
        let r = s.spectral_radius();
        assert!((r - 0.18f64.sqrt()).abs() < 0.02, "{r}");
    }
}

#[test]
fn diffusion_confined_to_spiric_section() {
    let bound = 3f64.sqrt() + 0.1;
    for s in spectra(EnsembleKind::GinibreDiffusion(DiffusionParams { t: 1.0 }), 1000, 2, 5) {
        assert!(s.real_eigs().iter().all(|x| x.abs() <= bound));
    }
    // Small t: all eigenvalues stay close to ±1.
    for s in spectra(EnsembleKind::GinibreDiffusion(DiffusionParams { t: 1e-4 }), 100, 2, 6) {
        assert!(s.eigenvalues().all(|z| (z.re.abs() - 1.0).abs() < 0.1 && z.im.abs() < 0.1));
    }
}

#[test]
fn regular_digraph_perron_frobenius() {
    for s in spectra(EnsembleKind::RegularDigraph(GraphParams { k: 2 }), 1000, 2, 7) {
        let top = s.real_eigs().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((top - 2.0).abs() < 1e-8, "{top}");
    }
}

#[test]
fn predictions_exist_for_every_kind() {
    let kinds = [
        EnsembleKind::Ginibre,
        EnsembleKind::SphericalProduct { k: 2 },
        EnsembleKind::RajanAbbott(RajanAbbottParams::new(0.8, 0.15, 0.9).unwrap()),
        EnsembleKind::GinibreDiffusion(DiffusionParams { t: 1.0 }),
        EnsembleKind::RegularDigraph(GraphParams { k: 3 }),
    ];
    for kind in kinds {
        let p = Prediction::for_kind(&kind).unwrap();
        assert!(p.norm_const() > 0.0);
        assert!((p.cdf(1e6).unwrap() - 1.0).abs() < 1e-3);
    }
}
