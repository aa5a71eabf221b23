//! Parallel Monte Carlo over trial indices.
//!
//! Trial `t` always draws from stream `(seed, t)`. Workers return per-trial
//! results, which are folded in trial order, so every output is independent of
//! the thread count and of scheduling.

use rayon::prelude::*;
use rmt_core::verify::{ExclusionPolicy, RunTallies};
use rmt_core::{compute_spectrum, DensityModel, RngStream, Spectrum};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Trials handed to the pool at once; bounds memory when spectra are not kept.
const CHUNK: u64 = 256;
/// Real eigenvalues further out than this multiple of the support hull count
/// as stragglers.
pub const OUTSIDE_MARGIN: f64 = 1.05;

/// Statistics over the raw spectra that the density pipeline does not keep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub trials: u64,
    pub mean_real_count: f64,
    /// Fraction of matrices whose eigenvalues are all real.
    pub all_real_fraction: f64,
    /// Mean over matrices of the largest complex-eigenvalue modulus.
    pub mean_complex_radius: Option<f64>,
    pub max_complex_radius: Option<f64>,
    /// Retained real eigenvalues beyond `1.05 ×` the support hull, as a fraction.
    pub outside_support_fraction: Option<f64>,
    /// Matrices whose trace check flagged an inaccurate spectrum.
    pub flagged_trials: u64,
}

#[derive(Debug, Clone, Default)]
pub struct SummaryAccumulator {
    trials: u64,
    reals: u64,
    all_real: u64,
    radius_sum: f64,
    radius_count: u64,
    radius_max: Option<f64>,
    retained: u64,
    outside: u64,
    flagged: u64,
    hull: Option<f64>,
}

impl SummaryAccumulator {
    /// `hull` is the half-width of the predicted real support, if finite.
    pub fn new(hull: Option<f64>) -> Self {
        Self { hull: hull.filter(|h| h.is_finite()), ..Self::default() }
    }

    pub fn add(&mut self, spectrum: &Spectrum, flagged: bool, policy: &ExclusionPolicy) {
        self.trials += 1;
        let reals = spectrum.real_eigs();
        self.reals += reals.len() as u64;
        if spectrum.complex_pairs().is_empty() {
            self.all_real += 1;
        }
        if let Some(r) = spectrum.complex_radius() {
            self.radius_sum += r;
            self.radius_count += 1;
            self.radius_max = Some(self.radius_max.map_or(r, |m| m.max(r)));
        }
        for &x in reals.iter().filter(|&&x| !policy.excludes(x)) {
            self.retained += 1;
            if let Some(h) = self.hull {
                if x.abs() > OUTSIDE_MARGIN * h {
                    self.outside += 1;
                }
            }
        }
        self.flagged += flagged as u64;
    }

    pub fn finish(&self) -> SpectralSummary {
        let t = self.trials.max(1) as f64;
        SpectralSummary {
            trials: self.trials,
            mean_real_count: self.reals as f64 / t,
            all_real_fraction: self.all_real as f64 / t,
            mean_complex_radius: (self.radius_count > 0).then(|| self.radius_sum / self.radius_count as f64),
            max_complex_radius: self.radius_max,
            outside_support_fraction: self.hull.map(|_| self.outside as f64 / self.retained.max(1) as f64),
            flagged_trials: self.flagged,
        }
    }
}

/// Merged output of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub tallies: RunTallies,
    pub summary: SpectralSummary,
    /// Per-trial spectra in trial order, when requested.
    pub spectra: Option<Vec<Spectrum>>,
    pub threads: usize,
}

pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::Usage(format!("run.threads: {e}")))
}

fn one_trial(cfg: &RunConfig, trial: u64) -> Result<(Spectrum, bool)> {
    let stage = || format!("trial {trial} (seed {}, stream {trial})", cfg.seed);
    let x = cfg.ensemble.sample(RngStream::new(cfg.seed, trial)).map_err(CliError::stage(format!("{}: sampling", stage())))?;
    let report = compute_spectrum(&x).map_err(CliError::stage(format!("{}: eigenvalues", stage())))?;
    let flagged = report.is_flagged();
    Ok((report.spectrum, flagged))
}

/// Support half-width used for straggler counts.
pub fn hull(cfg: &RunConfig) -> Result<Option<f64>> {
    let s = cfg.prediction()?.support();
    let h = s.lo().abs().max(s.hi().abs());
    Ok(h.is_finite().then_some(h))
}

/// Samples and diagonalizes `cfg.trials` matrices.
pub fn simulate(cfg: &RunConfig, keep_spectra: bool) -> Result<Simulation> {
    let pool = pool(cfg.threads)?;
    let mut tallies = RunTallies::new(&cfg.fit_grid.histogram(), &cfg.ks_grid.histogram(), cfg.ensemble.n);
    let mut acc = SummaryAccumulator::new(hull(cfg)?);
    let mut spectra = keep_spectra.then(Vec::new);
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + CHUNK).min(cfg.trials);
        let batch: Vec<Result<(Spectrum, bool)>> = pool.install(|| (start..end).into_par_iter().map(|t| one_trial(cfg, t)).collect());
        for r in batch {
            let (spectrum, flagged) = r?;
            tallies.add(&spectrum, &cfg.exclusions, &cfg.strip);
            acc.add(&spectrum, flagged, &cfg.exclusions);
            if let Some(s) = spectra.as_mut() {
                s.push(spectrum);
            }
        }
        start = end;
    }
    Ok(Simulation { tallies, summary: acc.finish(), spectra, threads: pool.current_num_threads() })
}

/// Folds already-sampled spectra (e.g. read back from a file).
pub fn tally_spectra(cfg: &RunConfig, spectra: &[Spectrum]) -> Result<(RunTallies, SpectralSummary)> {
    let mut tallies = RunTallies::new(&cfg.fit_grid.histogram(), &cfg.ks_grid.histogram(), cfg.ensemble.n);
    let mut acc = SummaryAccumulator::new(hull(cfg)?);
    for s in spectra {
        tallies.add(s, &cfg.exclusions, &cfg.strip);
        acc.add(s, false, &cfg.exclusions);
    }
    Ok((tallies, acc.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FileConfig, RunConfig};

    fn cfg(text: &str) -> RunConfig {
        RunConfig::resolve(&FileConfig::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut c = cfg("[run]\nn = 12\ntrials = 300\nseed = 5");
        c.threads = Some(1);
        let a = simulate(&c, true).unwrap();
        c.threads = Some(3);
        let b = simulate(&c, true).unwrap();
        assert_eq!(a.tallies, b.tallies);
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.spectra, b.spectra);
        let (t, s) = tally_spectra(&c, a.spectra.as_ref().unwrap()).unwrap();
        assert_eq!(t, a.tallies);
        assert_eq!(s.mean_complex_radius, a.summary.mean_complex_radius);
    }

    #[test]
    fn summary_counts() {
        let policy = ExclusionPolicy::none();
        let mut acc = SummaryAccumulator::new(Some(1.0));
        acc.add(&Spectrum::new(2, vec![0.5, 2.0], vec![]).unwrap(), false, &policy);
        acc.add(&Spectrum::new(2, vec![], vec![(0.0, 0.5)]).unwrap(), true, &policy);
        let s = acc.finish();
        assert_eq!((s.trials, s.flagged_trials), (2, 1));
        assert_eq!(s.mean_real_count, 1.0);
        assert_eq!(s.all_real_fraction, 0.5);
        assert_eq!(s.mean_complex_radius, Some(0.5));
        assert_eq!(s.outside_support_fraction, Some(0.5));
    }
}
