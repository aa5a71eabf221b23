use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{FileConfig, Overrides, RunConfig};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "rmt", version, about = "Real-eigenvalue density experiments for asymmetric random matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample matrices and write every eigenvalue (trial,re,im,is_real).
    Sample,
    /// Tabulate the analytic densities on a grid.
    Predict,
    /// Sample, estimate, fit the square-root relation and score it.
    Verify {
        /// Reuse a spectra.csv (or tallies.json) from `sample` instead of sampling.
        #[arg(long)]
        spectra: Option<PathBuf>,
    },
    /// Check partial Schur decompositions on random Ginibre matrices.
    SchurCheck,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config with [run], [ensemble], [grid], [strip], [output] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// ginibre | spherical | rajan_abbott | diffusion | digraph
    #[arg(long, global = true)]
    pub ensemble: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Never changes any output.
    #[arg(long, global = true, env = "RMT_THREADS")]
    pub threads: Option<usize>,
    /// Bins of the fit / L1 histogram.
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Bins of the fine KS histogram.
    #[arg(long, global = true)]
    pub ks_bins: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    /// Grid points for `predict`.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub strip_lo: Option<f64>,
    #[arg(long, global = true)]
    pub strip_hi: Option<f64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub f_e: Option<f64>,
    #[arg(long, global = true)]
    pub sigma_e: Option<f64>,
    #[arg(long, global = true)]
    pub sigma_i: Option<f64>,
    /// Drop eigenvalues at 0 (default on for 2-regular digraphs).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub exclude_zero: Option<bool>,
    /// Accumulate histograms only; do not write raw spectra.
    #[arg(long, global = true)]
    pub hist_only: bool,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            ensemble: self.ensemble.clone(),
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            threads: self.threads,
            k: self.k,
            t: self.t,
            f_e: self.f_e,
            sigma_e: self.sigma_e,
            sigma_i: self.sigma_i,
            exclude_zero: self.exclude_zero,
            bins: self.bins,
            ks_bins: self.ks_bins,
            xmin: self.xmin,
            xmax: self.xmax,
            points: self.points,
            strip_lo: self.strip_lo,
            strip_hi: self.strip_hi,
            out_dir: self.out_dir.clone(),
            hist_only: self.hist_only,
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        file.apply(&self.overrides());
        RunConfig::resolve(&file)
    }
}

/// Runs one parsed invocation and returns a one-line summary for stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let cfg = cli.common.resolve()?;
    let dir = cfg.out_dir.display().to_string();
    Ok(match &cli.command {
        Command::Sample => {
            let s = commands::sample(&cfg)?;
            format!(
                "sampled {} matrices (n = {}), mean real count {:.4}; wrote {}",
                s.summary.trials,
                cfg.ensemble.n,
                s.summary.mean_real_count,
                s.path.display()
            )
        }
        Command::Predict => {
            let (curve, _) = commands::predict(&cfg)?;
            format!("norm_const {:.6}; wrote {} points to {dir}", curve.norm_const, curve.xs.len())
        }
        Command::Verify { spectra } => {
            let r = commands::verify(&cfg, spectra.as_deref())?.verification;
            format!(
                "alpha {:.6} (predicted {:.6}), residual {:.4}, l1 {:.4}, ks {:.4}; wrote {dir}",
                r.alpha, r.predicted_norm_const, r.fit_residual, r.l1, r.ks
            )
        }
        Command::SchurCheck => {
            let r = commands::schur_check(&cfg)?;
            format!(
                "{} trials ok: reconstruction {:.2e}, orthogonality {:.2e}, y^2=bc {:.2e}",
                r.trials, r.max_reconstruction_error, r.max_orthogonality_defect, r.max_pair_relation_error
            )
        }
    })
}

/// Parses `args`, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

