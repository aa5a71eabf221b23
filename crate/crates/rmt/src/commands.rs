//! The four subcommands. Each writes its outputs under `cfg.out_dir` plus a
//! manifest, and returns what it wrote so tests can inspect it directly.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use rmt_core::ensembles::sample_ginibre;
use rmt_core::schur_lab::{jacobian_complex_pair, jacobian_real_pair, partial_schur_complex_pair, partial_schur_real_pair};
use rmt_core::verify::{self, Provenance, RunTallies, VerificationReport};
use rmt_core::{compute_spectrum, DensityCurve, DensityModel, RealMatrix, RngStream};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{self, CurveRow};
use crate::manifest::RunManifest;
use crate::runner::{self, SpectralSummary};

pub const SPECTRA_FILE: &str = "spectra.csv";
pub const TALLIES_FILE: &str = "tallies.json";
pub const PREDICTION_FILE: &str = "prediction.csv";
pub const REPORT_FILE: &str = "report.json";
pub const CURVE_FILE: &str = "curve.csv";
pub const SCHUR_FILE: &str = "schur_check.json";

/// Schur-lab acceptance thresholds.
pub const RECONSTRUCTION_TOL: f64 = 1e-12;
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
pub const PAIR_RELATION_TOL: f64 = 1e-10;

fn out(cfg: &RunConfig, file: &str) -> PathBuf {
    cfg.out_dir.join(file)
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub summary: SpectralSummary,
    pub manifest: RunManifest,
    /// `spectra.csv`, or `tallies.json` in hist-only mode.
    pub path: PathBuf,
}

/// Samples the ensemble and writes every eigenvalue (or, with `hist_only`,
/// only the merged tallies).
pub fn sample(cfg: &RunConfig) -> Result<SampleOutcome> {
    let started = Instant::now();
    let sim = runner::simulate(cfg, !cfg.hist_only)?;
    let path = match &sim.spectra {
        Some(spectra) => {
            let p = out(cfg, SPECTRA_FILE);
            io::write_spectra(&p, spectra)?;
            p
        }
        None => {
            let p = out(cfg, TALLIES_FILE);
            io::write_json(&p, &sim.tallies)?;
            p
        }
    };
    let mut m = RunManifest::new("sample", cfg);
    m.threads = sim.threads;
    m.excluded_count = Some(sim.tallies.real.excluded);
    m.irregular_exclusions = Some(sim.tallies.real.irregular_exclusions);
    m.summary = Some(sim.summary.clone());
    let manifest = m.finish(&[&path], started)?;
    Ok(SampleOutcome { summary: sim.summary, manifest, path })
}

/// Evaluates the analytic prediction on `cfg.predict_grid`.
pub fn predict(cfg: &RunConfig) -> Result<(DensityCurve, RunManifest)> {
    let started = Instant::now();
    let model = cfg.prediction()?;
    let curve = model.curve(&cfg.predict_grid.points());
    let path = out(cfg, PREDICTION_FILE);
    io::write_prediction(&path, &curve)?;
    let mut m = RunManifest::new("predict", cfg);
    m.norm_const = Some(curve.norm_const);
    m.support = Some(curve.support.clone());
    let manifest = m.finish(&[&path], started)?;
    Ok((curve, manifest))
}

/// Contents of `report.json`; nothing here depends on threads or timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub verification: VerificationReport,
    pub spectral: SpectralSummary,
}

/// Loads tallies from a previous `sample` run after checking its manifest.
fn load_sampled(cfg: &RunConfig, path: &Path) -> Result<(RunTallies, SpectralSummary)> {
    let mpath = io::manifest_path(path);
    if !mpath.exists() {
        return Err(CliError::Usage(format!("{}: no manifest next to spectra file", mpath.display())));
    }
    let manifest: RunManifest = io::read_json(&mpath)?;
    if manifest.sampling_hash != cfg.sampling_hash() {
        return Err(CliError::Usage(format!(
            "{}: manifest hash {} does not match this config ({}); rerun sample with the same ensemble, trials and seed",
            path.display(),
            manifest.sampling_hash,
            cfg.sampling_hash()
        )));
    }
    let name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let recorded = manifest.output(&name).ok_or_else(|| CliError::Usage(format!("{}: not listed in its manifest", path.display())))?;
    if recorded.sha256 != io::sha256_file(path)? {
        return Err(CliError::Usage(format!("{}: contents do not match the manifest checksum", path.display())));
    }
    let is_tallies = path.extension().is_some_and(|e| e == "json");
    let (tallies, summary) = if is_tallies {
        // Tallies bake in grids, strip and exclusions, so the whole config must match.
        if manifest.config_hash != cfg.config_hash() {
            return Err(CliError::Usage(format!("{}: tallies were built with a different grid/strip/exclusion config", path.display())));
        }
        let tallies: RunTallies = io::read_json(path)?;
        let summary = manifest.summary.clone().ok_or_else(|| CliError::Usage(format!("{}: manifest lacks a summary", mpath.display())))?;
        (tallies, summary)
    } else {
        let spectra = io::read_spectra(path, cfg.ensemble.n)?;
        if spectra.len() as u64 != cfg.trials {
            return Err(CliError::Usage(format!("{}: {} trials, config says {}", path.display(), spectra.len(), cfg.trials)));
        }
        let (tallies, summary) = runner::tally_spectra(cfg, &spectra)?;
        (tallies, manifest.summary.clone().unwrap_or(summary))
    };
    Ok((tallies, summary))
}

/// Sample (or load) → estimate → fit → score; writes `report.json` and `curve.csv`.
pub fn verify(cfg: &RunConfig, spectra: Option<&Path>) -> Result<RunReport> {
    let started = Instant::now();
    let model = cfg.prediction()?;
    let (tallies, spectral, threads) = match spectra {
        Some(p) => {
            let (t, s) = load_sampled(cfg, p)?;
            (t, s, 1)
        }
        None => {
            let sim = runner::simulate(cfg, false)?;
            (sim.tallies, sim.summary, sim.threads)
        }
    };

    let rho_r = verify::rho_r_from_tally(&tallies.real).map_err(CliError::stage("estimate_rho_r"))?;
    let rho_c = verify::rho_c_from_tally(&tallies.strip, &cfg.strip)
        .map_err(CliError::stage("estimate_rho_c_axis (widen the strip or add trials)"))?;
    let provenance = Provenance { seed: cfg.seed, trials: cfg.trials, n: cfg.ensemble.n };
    let verification = verify::build_report(cfg.ensemble.kind.name(), &tallies, &cfg.strip, &model, provenance)
        .map_err(CliError::stage("fit_sqrt_relation / score_against_catalog"))?;
    let pred = verify::binned_prediction(&tallies.real.hist, &model).map_err(CliError::stage("prediction"))?;

    let rows: Vec<CurveRow> = rho_r
        .centers
        .iter()
        .enumerate()
        .map(|(i, &x)| CurveRow { x, rho_r_hat: rho_r.values[i], rho_r_pred: pred[i], rho_c_hat: rho_c.values[i], rho_c_pred: model.rho_c_axis(x) })
        .collect();

    let report = RunReport { config_hash: cfg.config_hash(), verification, spectral };
    let report_path = out(cfg, REPORT_FILE);
    let curve_path = out(cfg, CURVE_FILE);
    io::write_json(&report_path, &report)?;
    io::write_curve(&curve_path, &rows)?;

    let mut m = RunManifest::new("verify", cfg);
    m.threads = threads;
    m.excluded_count = Some(report.verification.excluded_count);
    m.irregular_exclusions = Some(report.verification.irregular_exclusions);
    m.norm_const = Some(model.norm_const());
    m.support = Some(model.support());
    m.summary = Some(report.spectral.clone());
    m.finish(&[&report_path, &curve_path], started)?;
    Ok(report)
}

/// Worst-case errors of the partial Schur decompositions over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurCheckReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub real_pair_checks: u64,
    pub complex_pair_checks: u64,
    /// `‖X − O M Oᵀ‖_F / ‖X‖_F`.
    pub max_reconstruction_error: f64,
    pub max_orthogonality_defect: f64,
    /// Worst relative error of `y² = b·c`.
    pub max_pair_relation_error: f64,
    /// Jacobians vanish exactly at `x1 = x2`, `η = 0` and `y = 0`.
    pub degeneracy_identities_exact: bool,
    /// `η` for the 2×2 rotation `[[0, −1], [1, 0]]`; must be exactly 0.
    pub rotation_fixture_eta: f64,
    pub first_failure: Option<SchurFailure>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurFailure {
    pub seed: u64,
    pub trial: u64,
    pub what: String,
}

#[derive(Debug, Default)]
struct TrialCheck {
    real: bool,
    complex: bool,
    recon: f64,
    orth: f64,
    pair: f64,
    degenerate_ok: bool,
}

fn check_trial(x: &RealMatrix, stage: &str) -> Result<TrialCheck> {
    let spec = compute_spectrum(x).map_err(CliError::stage(format!("{stage}: eigenvalues")))?.spectrum;
    let norm = x.frobenius_norm();
    let mut c = TrialCheck { degenerate_ok: true, ..Default::default() };
    if let [l1, l2, ..] = *spec.real_eigs() {
        let d = partial_schur_real_pair(x, l1, l2).map_err(CliError::stage(format!("{stage}: real pair")))?;
        c.real = true;
        c.recon = c.recon.max(x.sub(&d.reconstruct()).frobenius_norm() / norm);
        c.orth = c.orth.max(d.o.orthogonality_defect());
        c.degenerate_ok &= jacobian_real_pair(d.x1, d.x1, &d.y1) == 0.0;
    }
    if let Some(&(re, im)) = spec.complex_pairs().first() {
        let d = partial_schur_complex_pair(x, re, im).map_err(CliError::stage(format!("{stage}: complex pair")))?;
        c.complex = true;
        c.recon = c.recon.max(x.sub(&d.reconstruct()).frobenius_norm() / norm);
        c.orth = c.orth.max(d.o.orthogonality_defect());
        c.pair = d.pair_relation_error();
        c.degenerate_ok &= jacobian_complex_pair(d.x, d.y, 0.0, &d.y2) == 0.0;
        c.degenerate_ok &= jacobian_complex_pair(d.x, 0.0, d.eta, &d.y2) == 0.0;
    }
    Ok(c)
}

/// Runs the partial-Schur invariant suite on `trials` Ginibre matrices of
/// size `n`. Any breach is reported with its seed and trial and returned as
/// an invariant error after the report is written.
pub fn schur_check(cfg: &RunConfig) -> Result<SchurCheckReport> {
    let started = Instant::now();
    let n = cfg.ensemble.n;
    if n < 2 {
        return Err(CliError::Usage("run.n: schur-check needs n >= 2".into()));
    }
    let pool = runner::pool(cfg.threads)?;
    let checks: Vec<Result<TrialCheck>> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let x = sample_ginibre(n, &mut RngStream::new(cfg.seed, t).rng());
                check_trial(&x, &format!("trial {t} (seed {})", cfg.seed))
            })
            .collect()
    });

    let rotation = RealMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]);
    let fixture = partial_schur_complex_pair(&rotation, 0.0, 1.0).map_err(CliError::stage("rotation fixture"))?;

    let mut r = SchurCheckReport {
        n,
        trials: cfg.trials,
        seed: cfg.seed,
        real_pair_checks: 0,
        complex_pair_checks: 0,
        max_reconstruction_error: 0.0,
        max_orthogonality_defect: 0.0,
        max_pair_relation_error: 0.0,
        degeneracy_identities_exact: true,
        rotation_fixture_eta: fixture.eta,
        first_failure: None,
        passed: true,
    };
    if fixture.eta != 0.0 {
        r.first_failure = Some(SchurFailure { seed: cfg.seed, trial: 0, what: "rotation fixture eta != 0".into() });
    }
    for (t, c) in (0u64..).zip(checks) {
        let c = c?;
        r.real_pair_checks += c.real as u64;
        r.complex_pair_checks += c.complex as u64;
        r.max_reconstruction_error = r.max_reconstruction_error.max(c.recon);
        r.max_orthogonality_defect = r.max_orthogonality_defect.max(c.orth);
        r.max_pair_relation_error = r.max_pair_relation_error.max(c.pair);
        r.degeneracy_identities_exact &= c.degenerate_ok;
        let what = if c.recon > RECONSTRUCTION_TOL {
            Some(format!("reconstruction error {:e}", c.recon))
        } else if c.orth > ORTHOGONALITY_TOL {
            Some(format!("orthogonality defect {:e}", c.orth))
        } else if c.pair > PAIR_RELATION_TOL {
            Some(format!("y^2 = bc relative error {:e}", c.pair))
        } else if !c.degenerate_ok {
            Some("jacobian does not vanish at a degenerate point".into())
        } else {
            None
        };
        if let (Some(what), None) = (what, &r.first_failure) {
            r.first_failure = Some(SchurFailure { seed: cfg.seed, trial: t, what });
        }
    }
    r.passed = r.first_failure.is_none();

    let path = out(cfg, SCHUR_FILE);
    io::write_json(&path, &r)?;
    let mut m = RunManifest::new("schur-check", cfg);
    m.threads = pool.current_num_threads();
    m.finish(&[&path], started)?;
    match &r.first_failure {
        Some(f) => Err(CliError::Invariant(format!("{} (seed {}, trial {})", f.what, f.seed, f.trial))),
        None => Ok(r),
    }
}
