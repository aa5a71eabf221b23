//! Run configuration: a TOML file with flag overrides, resolved into a
//! fully explicit [`RunConfig`] whose serialized form is hashed into every
//! manifest.

use std::path::{Path, PathBuf};

use rmt_core::ensembles::{DiffusionParams, GraphParams, RajanAbbottParams};
use rmt_core::verify::{ExclusionPolicy, StripSpec};
use rmt_core::{DensityModel, EnsembleKind, EnsembleSpec, Histogram1D, Prediction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const DEFAULT_N: usize = 100;
pub const DEFAULT_TRIALS: u64 = 100;
/// Coarse bins for the fit and L1; few bins keep the per-bin noise of the
/// fit residual small at desk-scale trial counts.
pub const DEFAULT_FIT_BINS: usize = 9;
pub const DEFAULT_KS_BINS: usize = 2000;
pub const DEFAULT_PREDICT_POINTS: usize = 201;
pub const DEFAULT_OUT_DIR: &str = "rmt-out";
/// Fig.-2 style excitatory/inhibitory parameters.
pub const DEFAULT_RAJAN_ABBOTT: (f64, f64, f64) = (0.8, 0.15, 0.9);

/// Heavy-tailed ensembles get a fixed window instead of a support hull.
const SPHERICAL_FIT_HALF_WIDTH: f64 = 4.0;
const SPHERICAL_FIT_BINS: usize = 16;
const SPHERICAL_PREDICT_HALF_WIDTH: f64 = 5.0;
/// Margin around the support hull for KS and prediction grids.
const HULL_MARGIN: f64 = 1.1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub strip: StripSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub kind: Option<String>,
    pub k: Option<usize>,
    pub t: Option<f64>,
    pub f_e: Option<f64>,
    pub sigma_e: Option<f64>,
    pub sigma_i: Option<f64>,
    pub exclude_zero: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub bins: Option<usize>,
    pub ks_bins: Option<usize>,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripSection {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub hist_only: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Lays `o` over the file values; flags win.
    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        set(&mut self.run.n, &o.n);
        set(&mut self.run.trials, &o.trials);
        set(&mut self.run.seed, &o.seed);
        set(&mut self.run.threads, &o.threads);
        set(&mut self.ensemble.kind, &o.ensemble);
        set(&mut self.ensemble.k, &o.k);
        set(&mut self.ensemble.t, &o.t);
        set(&mut self.ensemble.f_e, &o.f_e);
        set(&mut self.ensemble.sigma_e, &o.sigma_e);
        set(&mut self.ensemble.sigma_i, &o.sigma_i);
        set(&mut self.ensemble.exclude_zero, &o.exclude_zero);
        set(&mut self.grid.bins, &o.bins);
        set(&mut self.grid.ks_bins, &o.ks_bins);
        set(&mut self.grid.xmin, &o.xmin);
        set(&mut self.grid.xmax, &o.xmax);
        set(&mut self.grid.points, &o.points);
        set(&mut self.strip.lo, &o.strip_lo);
        set(&mut self.strip.hi, &o.strip_hi);
        set(&mut self.output.dir, &o.out_dir);
        if o.hist_only {
            self.output.hist_only = Some(true);
        }
    }
}

/// Flag values; `None` leaves the file (or default) value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ensemble: Option<String>,
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub k: Option<usize>,
    pub t: Option<f64>,
    pub f_e: Option<f64>,
    pub sigma_e: Option<f64>,
    pub sigma_i: Option<f64>,
    pub exclude_zero: Option<bool>,
    pub bins: Option<usize>,
    pub ks_bins: Option<usize>,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub points: Option<usize>,
    pub strip_lo: Option<f64>,
    pub strip_hi: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub hist_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl GridSpec {
    pub fn histogram(&self) -> Histogram1D {
        Histogram1D::new(self.lo, self.hi, self.bins).expect("grid validated at resolve time")
    }

    /// `points` equally spaced abscissae from `lo` to `hi` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let m = self.bins.max(2);
        let h = (self.hi - self.lo) / (m - 1) as f64;
        (0..m).map(|i| if i == m - 1 { self.hi } else { self.lo + h * i as f64 }).collect()
    }
}

/// Everything that determines output bytes. Runtime knobs (threads, output
/// directory) are carried alongside but never hashed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ensemble: EnsembleSpec,
    pub trials: u64,
    pub seed: u64,
    pub fit_grid: GridSpec,
    pub ks_grid: GridSpec,
    pub strip: StripSpec,
    pub exclusions: ExclusionPolicy,
    #[serde(skip)]
    pub predict_grid: GridSpec,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub hist_only: bool,
}

/// The part of a config that fixes the sampled spectra.
#[derive(Serialize)]
struct SamplingKey<'a> {
    ensemble: &'a EnsembleSpec,
    trials: u64,
    seed: u64,
}

fn sha256_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn usage(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{key}: {msg}"))
}

pub fn parse_kind(name: &str) -> Option<&'static str> {
    Some(match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "ginibre" => "ginibre",
        "spherical" | "spherical_product" => "spherical_product",
        "rajan_abbott" => "rajan_abbott",
        "diffusion" | "ginibre_diffusion" => "ginibre_diffusion",
        "digraph" | "regular_digraph" => "regular_digraph",
        _ => return None,
    })
}

impl RunConfig {
    pub fn resolve(file: &FileConfig) -> Result<Self> {
        let e = &file.ensemble;
        let name = e.kind.as_deref().unwrap_or("ginibre");
        let kind = match parse_kind(name).ok_or_else(|| usage("ensemble.kind", format!("unknown ensemble '{name}'")))? {
            "ginibre" => EnsembleKind::Ginibre,
            "spherical_product" => {
                let k = e.k.unwrap_or(1);
                if k == 0 {
                    return Err(usage("ensemble.k", "spherical product needs k >= 1"));
                }
                EnsembleKind::SphericalProduct { k }
            }
            "rajan_abbott" => {
                let (f, se, si) = DEFAULT_RAJAN_ABBOTT;
                let p = RajanAbbottParams { f_e: e.f_e.unwrap_or(f), sigma_e: e.sigma_e.unwrap_or(se), sigma_i: e.sigma_i.unwrap_or(si) };
                if !(p.f_e > 0.0 && p.f_e < 1.0) {
                    return Err(usage("ensemble.f_e", "must lie in (0, 1)"));
                }
                if !(p.sigma_e > 0.0) || !p.sigma_e.is_finite() {
                    return Err(usage("ensemble.sigma_e", "must be positive"));
                }
                if !(p.sigma_i > 0.0) || !p.sigma_i.is_finite() {
                    return Err(usage("ensemble.sigma_i", "must be positive"));
                }
                EnsembleKind::RajanAbbott(p)
            }
            "ginibre_diffusion" => {
                let t = e.t.unwrap_or(1.0);
                if !(t > 0.0) || !t.is_finite() {
                    return Err(usage("ensemble.t", "diffusion time must be positive"));
                }
                EnsembleKind::GinibreDiffusion(DiffusionParams { t })
            }
            _ => {
                let k = e.k.unwrap_or(3);
                if k < 2 {
                    return Err(usage("ensemble.k", "regular digraph needs k >= 2"));
                }
                EnsembleKind::RegularDigraph(GraphParams { k })
            }
        };

        let n = file.run.n.unwrap_or(DEFAULT_N);
        if n == 0 {
            return Err(usage("run.n", "must be positive"));
        }
        let trials = file.run.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(usage("run.trials", "must be positive"));
        }
        let ensemble = EnsembleSpec { kind, n };
        ensemble.validate().map_err(|err| match err {
            rmt_core::Error::Config(msg) => usage("ensemble", msg),
            other => usage("ensemble", other),
        })?;

        let prediction = Prediction::for_kind(&kind).map_err(CliError::stage("prediction"))?;
        let hull = {
            let s = prediction.support();
            s.lo().abs().max(s.hi().abs())
        };

        let g = &file.grid;
        if let Some(b) = g.bins {
            if b < 2 {
                return Err(usage("grid.bins", "need at least 2 bins"));
            }
        }
        let fit_grid = if hull.is_finite() {
            let bins = g.bins.unwrap_or(DEFAULT_FIT_BINS);
            // Edge-centered: the outermost bins straddle the support edges, where
            // the fit drops them, so interior bins are not biased by the edge jump.
            let w = 2.0 * hull / (bins - 1) as f64;
            GridSpec { lo: g.xmin.unwrap_or(-hull - 0.5 * w), hi: g.xmax.unwrap_or(hull + 0.5 * w), bins }
        } else {
            let h = SPHERICAL_FIT_HALF_WIDTH;
            GridSpec { lo: g.xmin.unwrap_or(-h), hi: g.xmax.unwrap_or(h), bins: g.bins.unwrap_or(SPHERICAL_FIT_BINS) }
        };
        if !(fit_grid.lo < fit_grid.hi) || !fit_grid.lo.is_finite() || !fit_grid.hi.is_finite() {
            return Err(usage("grid.xmin", "need finite xmin < xmax"));
        }

        let ks_bins = g.ks_bins.unwrap_or(DEFAULT_KS_BINS);
        if ks_bins == 0 {
            return Err(usage("grid.ks_bins", "must be positive"));
        }
        let ks_half = match kind {
            // Central 98% of the mass for k = 1; heavy tails stay off the grid.
            EnsembleKind::SphericalProduct { k } => (0.49 * std::f64::consts::PI).tan().powi(k as i32),
            _ => HULL_MARGIN * hull,
        };
        let ks_grid = GridSpec { lo: -ks_half, hi: ks_half, bins: ks_bins };

        let points = g.points.unwrap_or(DEFAULT_PREDICT_POINTS);
        if points < 2 {
            return Err(usage("grid.points", "need at least 2 points"));
        }
        let ph = if hull.is_finite() { HULL_MARGIN * hull } else { SPHERICAL_PREDICT_HALF_WIDTH };
        let predict_grid = GridSpec { lo: g.xmin.unwrap_or(-ph), hi: g.xmax.unwrap_or(ph), bins: points };
        if !(predict_grid.lo < predict_grid.hi) {
            return Err(usage("grid.xmin", "need xmin < xmax"));
        }

        let default_strip = StripSpec::default_for(n, prediction.support_height(), prediction.rho_c_axis(0.0).to_f64());
        let strip = StripSpec { y_lo: file.strip.lo.unwrap_or(default_strip.y_lo), y_hi: file.strip.hi.unwrap_or(default_strip.y_hi) };
        strip.validate().map_err(|_| usage("strip.lo", "need 0 < strip.lo < strip.hi"))?;

        let exclusions = match kind {
            EnsembleKind::RegularDigraph(p) => ExclusionPolicy {
                perron_frobenius: Some(p.k as f64),
                zero_mass: e.exclude_zero.unwrap_or(p.k == 2),
            },
            _ => ExclusionPolicy { perron_frobenius: None, zero_mass: e.exclude_zero.unwrap_or(false) },
        };

        let threads = file.run.threads.filter(|&t| t > 0);
        Ok(Self {
            ensemble,
            trials,
            seed: file.run.seed.unwrap_or(0),
            fit_grid,
            ks_grid,
            strip,
            exclusions,
            predict_grid,
            threads,
            out_dir: file.output.dir.clone().unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
            hist_only: file.output.hist_only.unwrap_or(false),
        })
    }

    pub fn prediction(&self) -> Result<Prediction> {
        Prediction::for_kind(&self.ensemble.kind).map_err(CliError::stage("prediction"))
    }

    /// Hash of every field that affects analysis output.
    pub fn config_hash(&self) -> String {
        sha256_json(self)
    }

    /// Hash of the fields that fix the sampled spectra.
    pub fn sampling_hash(&self) -> String {
        sha256_json(&SamplingKey { ensemble: &self.ensemble, trials: self.trials, seed: self.seed })
    }
}
