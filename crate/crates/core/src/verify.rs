//! Empirical test of the square-root relation.
//!
//! Spectra are reduced to integer histograms (tallies) that merge exactly, so
//! results never depend on how trials were split across workers. From the
//! tallies we estimate `ρ^r` (unit mass over retained real eigenvalues) and
//! `ρ^c` on the real axis (from a thin strip above it), fit `ρ^r = α√ρ^c`,
//! and score `ρ̂^r` against the analytic prediction.

use alloc::vec::Vec;

use crate::densities::DensityModel;
use crate::histogram::{Histogram1D, Normalization};
use crate::{Error, Result, Spectrum};

/// Absolute tolerance, relative to `k`, for the Perron–Frobenius exclusion.
pub const PERRON_FROBENIUS_TOL: f64 = 1e-6;
/// Absolute tolerance for the zero point-mass exclusion.
pub const ZERO_MASS_TOL: f64 = 1e-8;
/// Minimum number of bins the square-root fit needs.
pub const MIN_FIT_BINS: usize = 5;

/// Horizontal strips `±[y_lo, y_hi]` used to estimate `ρ^c(x + 0i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StripSpec {
    pub y_lo: f64,
    pub y_hi: f64,
}

impl StripSpec {
    pub fn new(y_lo: f64, y_hi: f64) -> Result<Self> {
        let s = Self { y_lo, y_hi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_lo > 0.0) || !(self.y_hi > self.y_lo) || !self.y_hi.is_finite() {
            return Err(Error::Config("strip needs 0 < y_lo < y_hi"));
        }
        Ok(())
    }

    /// `y_lo = 3s/√n`, `y_hi = max(2·y_lo, 0.1·height)`. The lower bound keeps
    /// the strip clear of the depletion zone next to the real axis, which is a
    /// few mean spacings `1/√(n ρ^c)` wide. `s = min(1, 1/√(π ρ^c(0)))` is that
    /// spacing relative to the Ginibre one (`s = 1` there), so spectra packed
    /// more densely around the origin get a proportionally thinner strip.
    pub fn default_for(n: usize, support_height: f64, axis_density: f64) -> Self {
        let root_n = (n.max(1) as f64).sqrt();
        let height = if support_height.is_finite() { support_height } else { 1.0 };
        let s = if axis_density.is_finite() && axis_density > 0.0 {
            (1.0 / (core::f64::consts::PI * axis_density).sqrt()).min(1.0)
        } else {
            1.0
        };
        let y_lo = 3.0 * s / root_n;
        Self { y_lo, y_hi: (2.0 * y_lo).max(0.1 * height) }
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.y_lo && y <= self.y_hi
    }
}

/// Which point masses to drop before histogramming real eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExclusionPolicy {
    /// Degree `k` of a regular graph ensemble: drop real eigenvalues within
    /// `1e−6·k` of `k`.
    pub perron_frobenius: Option<f64>,
    /// Drop real eigenvalues within `1e−8` of zero.
    pub zero_mass: bool,
}

impl ExclusionPolicy {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_perron_frobenius(&self, x: f64) -> bool {
        self.perron_frobenius.is_some_and(|k| (x - k).abs() <= PERRON_FROBENIUS_TOL * k)
    }

    pub fn excludes(&self, x: f64) -> bool {
        self.is_perron_frobenius(x) || (self.zero_mass && x.abs() <= ZERO_MASS_TOL)
    }
}

/// Histogram of retained real eigenvalues plus exclusion bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealTally {
    pub hist: Histogram1D,
    pub excluded: u64,
    /// Matrices that did not lose exactly one Perron–Frobenius eigenvalue
    /// (only tracked when that rule is on).
    pub irregular_exclusions: u64,
}

impl RealTally {
    pub fn new(template: &Histogram1D) -> Self {
        Self { hist: template.empty_like(), excluded: 0, irregular_exclusions: 0 }
    }

    pub fn add(&mut self, spectrum: &Spectrum, policy: &ExclusionPolicy) {
        let mut dropped = 0u64;
        let mut perron = 0u64;
        for &x in spectrum.real_eigs() {
            if policy.excludes(x) {
                dropped += 1;
                perron += u64::from(policy.is_perron_frobenius(x));
            } else {
                self.hist.push(x);
            }
        }
        if policy.perron_frobenius.is_some() && perron != 1 {
            self.irregular_exclusions += 1;
        }
        self.excluded += dropped;
        self.hist.add_weight(1);
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<()> {
        self.hist.merge_from(&other.hist)?;
        self.excluded += other.excluded;
        self.irregular_exclusions += other.irregular_exclusions;
        Ok(())
    }

    /// Retained plus excluded real eigenvalues.
    pub fn real_total(&self) -> u64 {
        self.hist.total() + self.excluded
    }

    /// Fraction of real eigenvalues dropped as point masses.
    pub fn excluded_mass(&self) -> f64 {
        let total = self.real_total();
        if total == 0 {
            0.0
        } else {
            self.excluded as f64 / total as f64
        }
    }
}

/// Histogram of upper-half-plane representatives inside the strip.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StripTally {
    pub hist: Histogram1D,
    /// Matrix dimension, needed to turn counts into a unit-mass density.
    pub n: usize,
}

impl StripTally {
    pub fn new(template: &Histogram1D, n: usize) -> Self {
        Self { hist: template.empty_like(), n }
    }

    /// Counts `x + iy` with `y` in the strip; the conjugate lands in the
    /// mirror strip, so one half suffices.
    pub fn add(&mut self, spectrum: &Spectrum, strip: &StripSpec) {
        for &(x, y) in spectrum.complex_pairs() {
            if strip.contains(y) {
                self.hist.push(x);
            }
        }
        self.hist.add_weight(1);
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch);
        }
        self.hist.merge_from(&other.hist)
    }
}

/// Bin-wise density estimate on a histogram grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalDensity {
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    pub bin_width: f64,
}

impl EmpiricalDensity {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width
    }
}

fn density(hist: &Histogram1D, normalization: Normalization) -> Result<EmpiricalDensity> {
    Ok(EmpiricalDensity { centers: hist.centers(), values: hist.to_density(normalization)?, bin_width: hist.bin_width() })
}

/// Unit-mass histogram density of the real eigenvalues that fall on the grid.
pub fn rho_r_from_tally(tally: &RealTally) -> Result<EmpiricalDensity> {
    if tally.hist.in_range_total() == 0 {
        return Err(Error::InsufficientData("no real eigenvalues left on the grid after exclusions"));
    }
    density(&tally.hist, Normalization::UnitMass)
}

/// `ρ̂^c(x) = count / (trials·n·(y_hi − y_lo)·Δx)`.
pub fn rho_c_from_tally(tally: &StripTally, strip: &StripSpec) -> Result<EmpiricalDensity> {
    strip.validate()?;
    if tally.hist.in_range_total() == 0 {
        return Err(Error::InsufficientData("strip holds no eigenvalues; widen the strip or add trials"));
    }
    density(&tally.hist, Normalization::PerMatrix { count_scale: tally.n as f64 * strip.height() })
}

pub fn estimate_rho_r(
    spectra: &[Spectrum],
    template: &Histogram1D,
    policy: &ExclusionPolicy,
) -> Result<(EmpiricalDensity, RealTally)> {
    if spectra.is_empty() {
        return Err(Error::InsufficientData("no spectra"));
    }
    let mut tally = RealTally::new(template);
    for s in spectra {
        tally.add(s, policy);
    }
    Ok((rho_r_from_tally(&tally)?, tally))
}

pub fn estimate_rho_c_axis(spectra: &[Spectrum], strip: &StripSpec, template: &Histogram1D) -> Result<EmpiricalDensity> {
    strip.validate()?;
    let Some(first) = spectra.first() else {
        return Err(Error::InsufficientData("no spectra"));
    };
    let mut tally = StripTally::new(template, first.n());
    for s in spectra {
        if s.n() != tally.n {
            return Err(Error::ShapeMismatch);
        }
        tally.add(s, strip);
    }
    rho_c_from_tally(&tally, strip)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SqrtFit {
    pub alpha: f64,
    /// `RMS(ρ̂^r − α√ρ̂^c) / RMS(ρ̂^r)` over the bins used.
    pub residual: f64,
    pub bins_used: usize,
}

/// Least-squares `α` in `ρ̂^r ≈ α√ρ̂^c`, skipping the outermost occupied bin
/// on each side (bin averages of a density with a jump are biased there).
pub fn fit_sqrt_relation(rho_r: &[f64], rho_c: &[f64]) -> Result<SqrtFit> {
    if rho_r.len() != rho_c.len() {
        return Err(Error::ShapeMismatch);
    }
    let occupied = |i: usize| rho_r[i] > 0.0 || rho_c[i] > 0.0;
    let (Some(first), Some(last)) = ((0..rho_r.len()).find(|&i| occupied(i)), (0..rho_r.len()).rfind(|&i| occupied(i)))
    else {
        return Err(Error::InsufficientData("both density estimates vanish"));
    };
    let used: Vec<usize> = (first + 1..last).filter(|&i| rho_r[i] > 0.0 && rho_c[i] > 0.0).collect();
    if used.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientData("fewer than 5 bins with both estimates positive"));
    }
    let num: f64 = used.iter().map(|&i| rho_r[i] * rho_c[i].sqrt()).sum();
    let den: f64 = used.iter().map(|&i| rho_c[i]).sum();
    let alpha = num / den;
    let misfit: f64 = used.iter().map(|&i| (rho_r[i] - alpha * rho_c[i].sqrt()).powi(2)).sum();
    let scale: f64 = used.iter().map(|&i| rho_r[i] * rho_r[i]).sum();
    Ok(SqrtFit { alpha, residual: (misfit / scale).sqrt(), bins_used: used.len() })
}

/// Prediction mass per bin divided by the bin width, from the model CDF.
pub fn binned_prediction<M: DensityModel + ?Sized>(hist: &Histogram1D, model: &M) -> Result<Vec<f64>> {
    let edges: Vec<f64> = (0..=hist.bins()).map(|i| hist.edge(i)).collect();
    let cdf = model.cdf_on_grid(&edges)?;
    let w = hist.bin_width();
    Ok(cdf.windows(2).map(|c| (c[1] - c[0]) / w).collect())
}

/// `Σ_b |p̂_b − p_b|` over bin masses, plus the mismatch of the mass below
/// and above the grid. Empirical masses are fractions of every retained
/// eigenvalue and predicted masses come from CDF differences, so a grid that
/// truncates heavy tails is not penalized for the truncation itself.
pub fn l1_distance<M: DensityModel + ?Sized>(tally: &RealTally, model: &M) -> Result<f64> {
    let hist = &tally.hist;
    let total = hist.total();
    if hist.in_range_total() == 0 {
        return Err(Error::InsufficientData("no real eigenvalues left on the grid after exclusions"));
    }
    let edges: Vec<f64> = (0..=hist.bins()).map(|i| hist.edge(i)).collect();
    let cdf = model.cdf_on_grid(&edges)?;
    let frac = |c: u64| c as f64 / total as f64;
    let inside: f64 = hist.counts().iter().zip(cdf.windows(2)).map(|(&c, f)| (frac(c) - (f[1] - f[0])).abs()).sum();
    let tails = (frac(hist.below()) - cdf[0]).abs() + (frac(hist.above()) - (1.0 - cdf[hist.bins()])).abs();
    Ok(inside + tails)
}

/// `max_j |F̂(e_j) − F(e_j)|` over the grid edges, where the empirical CDF
/// counts every retained eigenvalue, including those below and above the
/// grid. Heavy tails therefore only need a grid covering the bulk.
pub fn ks_statistic<M: DensityModel + ?Sized>(tally: &RealTally, model: &M) -> Result<f64> {
    let hist = &tally.hist;
    let total = hist.total();
    if total == 0 {
        return Err(Error::InsufficientData("no real eigenvalues left after exclusions"));
    }
    let edges: Vec<f64> = (0..=hist.bins()).map(|i| hist.edge(i)).collect();
    let cdf = model.cdf_on_grid(&edges)?;
    let mut below = hist.below();
    let mut worst = 0.0f64;
    for (j, f) in cdf.iter().enumerate() {
        let ecdf = below as f64 / total as f64;
        worst = worst.max((ecdf - f).abs());
        if j < hist.bins() {
            below += hist.counts()[j];
        }
    }
    Ok(worst.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Score {
    pub l1: f64,
    pub ks: f64,
}

pub fn score_against_catalog<M: DensityModel + ?Sized>(tally: &RealTally, model: &M) -> Result<Score> {
    Ok(Score { l1: l1_distance(tally, model)?, ks: ks_statistic(tally, model)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub seed: u64,
    pub trials: u64,
    pub n: usize,
}

/// Outcome of one verification run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub ensemble: alloc::string::String,
    pub alpha: f64,
    /// `C` of the analytic prediction, for comparison with `alpha`.
    pub predicted_norm_const: f64,
    pub fit_residual: f64,
    pub bins_used: usize,
    pub l1: f64,
    pub ks: f64,
    pub excluded_mass: f64,
    pub excluded_count: u64,
    /// Matrices that did not lose exactly one Perron–Frobenius eigenvalue.
    pub irregular_exclusions: u64,
    /// Fraction of retained real eigenvalues that fell outside the grid.
    pub off_grid_fraction: f64,
    pub mean_real_count: f64,
    pub provenance: Provenance,
}

/// Tallies gathered over one run.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunTallies {
    /// Coarse grid shared by `ρ̂^r` and `ρ̂^c` for the fit and L1.
    pub real: RealTally,
    /// Fine grid for the KS statistic.
    pub real_fine: RealTally,
    pub strip: StripTally,
}

impl RunTallies {
    pub fn new(fit_grid: &Histogram1D, ks_grid: &Histogram1D, n: usize) -> Self {
        Self { real: RealTally::new(fit_grid), real_fine: RealTally::new(ks_grid), strip: StripTally::new(fit_grid, n) }
    }

    pub fn add(&mut self, spectrum: &Spectrum, policy: &ExclusionPolicy, strip: &StripSpec) {
        self.real.add(spectrum, policy);
        self.real_fine.add(spectrum, policy);
        self.strip.add(spectrum, strip);
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<()> {
        self.real.merge_from(&other.real)?;
        self.real_fine.merge_from(&other.real_fine)?;
        self.strip.merge_from(&other.strip)
    }
}

/// Fit and score merged tallies.
pub fn build_report<M: DensityModel + ?Sized>(
    ensemble: &str,
    tallies: &RunTallies,
    strip: &StripSpec,
    model: &M,
    provenance: Provenance,
) -> Result<VerificationReport> {
    let rho_r = rho_r_from_tally(&tallies.real)?;
    let rho_c = rho_c_from_tally(&tallies.strip, strip)?;
    let fit = fit_sqrt_relation(&rho_r.values, &rho_c.values)?;
    let l1 = l1_distance(&tallies.real, model)?;
    let ks = ks_statistic(&tallies.real_fine, model)?;
    let real = &tallies.real;
    let retained = real.hist.total();
    Ok(VerificationReport {
        ensemble: ensemble.into(),
        alpha: fit.alpha,
        predicted_norm_const: model.norm_const(),
        fit_residual: fit.residual,
        bins_used: fit.bins_used,
        l1,
        ks,
        excluded_mass: real.excluded_mass(),
        excluded_count: real.excluded,
        irregular_exclusions: real.irregular_exclusions,
        off_grid_fraction: if retained == 0 { 0.0 } else { real.hist.overflow() as f64 / retained as f64 },
        mean_real_count: real.real_total() as f64 / real.hist.weight().max(1) as f64,
        provenance,
    })
}
