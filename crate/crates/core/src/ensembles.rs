//! Seeded samplers for the real random-matrix ensembles.
//!
//! Every sampler is a pure function of `(n, params, seed, stream_index)`:
//! randomness comes from a ChaCha8 generator keyed by the seed, with one
//! independent stream per Monte Carlo trial.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, RealMatrix, Result};

/// Default number of whole-sample rejections for regular digraphs.
pub const DEFAULT_DIGRAPH_ATTEMPTS: usize = 10_000;

/// `(seed, stream_index)` pair naming one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RajanAbbottParams {
    /// Fraction of excitatory columns, in (0, 1).
    pub f_e: f64,
    pub sigma_e: f64,
    pub sigma_i: f64,
}

impl RajanAbbottParams {
    pub fn new(f_e: f64, sigma_e: f64, sigma_i: f64) -> Result<Self> {
        let p = Self { f_e, sigma_e, sigma_i };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_e > 0.0 && self.f_e < 1.0) {
            return Err(Error::Config("f_e must lie in (0, 1)"));
        }
        if !(self.sigma_e > 0.0 && self.sigma_i > 0.0) || !self.sigma_e.is_finite() || !self.sigma_i.is_finite() {
            return Err(Error::Config("sigma_e and sigma_i must be positive"));
        }
        Ok(())
    }

    /// Number of excitatory columns for dimension `n` (nearest integer).
    pub fn excitatory_count(&self, n: usize) -> usize {
        (self.f_e * n as f64).round() as usize
    }

    /// Support radius `√(f_E σ_E² + (1 − f_E) σ_I²)`.
    pub fn support_radius(&self) -> f64 {
        (self.f_e * self.sigma_e * self.sigma_e + (1.0 - self.f_e) * self.sigma_i * self.sigma_i).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiffusionParams {
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraphParams {
    pub k: usize,
}

/// Which ensemble, with its kind-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum EnsembleKind {
    Ginibre,
    SphericalProduct { k: usize },
    RajanAbbott(RajanAbbottParams),
    GinibreDiffusion(DiffusionParams),
    RegularDigraph(GraphParams),
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::Ginibre => "ginibre",
            EnsembleKind::SphericalProduct { .. } => "spherical_product",
            EnsembleKind::RajanAbbott(_) => "rajan_abbott",
            EnsembleKind::GinibreDiffusion(_) => "ginibre_diffusion",
            EnsembleKind::RegularDigraph(_) => "regular_digraph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: EnsembleKind,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize) -> Result<Self> {
        let spec = Self { kind, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Config("n must be positive"));
        }
        match self.kind {
            EnsembleKind::Ginibre => Ok(()),
            EnsembleKind::SphericalProduct { k } => {
                if k == 0 {
                    Err(Error::Config("spherical product needs k >= 1"))
                } else if n < 2 {
                    Err(Error::Config("spherical product needs n >= 2"))
                } else {
                    Ok(())
                }
            }
            EnsembleKind::RajanAbbott(p) => {
                p.validate()?;
                let ne = p.excitatory_count(n);
                if ne == 0 || ne >= n {
                    Err(Error::Config("round(f_e * n) must lie in [1, n - 1]"))
                } else {
                    Ok(())
                }
            }
            EnsembleKind::GinibreDiffusion(p) => {
                if !(p.t > 0.0) || !p.t.is_finite() {
                    Err(Error::Config("diffusion time t must be positive"))
                } else if n % 2 != 0 {
                    Err(Error::Config("ginibre diffusion needs even n"))
                } else {
                    Ok(())
                }
            }
            EnsembleKind::RegularDigraph(p) => {
                if p.k < 2 {
                    Err(Error::Config("regular digraph needs k >= 2"))
                } else if p.k >= n {
                    Err(Error::Config("regular digraph needs k < n"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Draws one matrix from `stream`.
    pub fn sample(&self, stream: RngStream) -> Result<RealMatrix> {
        self.validate()?;
        let mut rng = stream.rng();
        let n = self.n;
        match self.kind {
            EnsembleKind::Ginibre => Ok(sample_ginibre(n, &mut rng)),
            EnsembleKind::SphericalProduct { k } => sample_spherical_product(n, k, &mut rng),
            EnsembleKind::RajanAbbott(p) => sample_rajan_abbott(n, &p, &mut rng),
            EnsembleKind::GinibreDiffusion(p) => sample_ginibre_diffusion(n, &p, &mut rng),
            EnsembleKind::RegularDigraph(p) => {
                sample_regular_digraph(n, &p, DEFAULT_DIGRAPH_ATTEMPTS, &mut rng)
            }
        }
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(n: usize, std: f64, rng: &mut R) -> RealMatrix {
    RealMatrix::from_fn(n, |_, _| std * rng.sample::<f64, _>(StandardNormal))
}

/// I.i.d. `N(0, 1/n)` entries; the bulk spectrum fills the unit disk.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    gaussian_matrix(n, 1.0 / (n as f64).sqrt(), rng)
}

/// `Π_j A_j B_j⁻¹` with independent Ginibre factors.
///
/// A numerically singular `B_j` is redrawn once before giving up.
pub fn sample_spherical_product<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<RealMatrix> {
    if k == 0 || n < 2 {
        return Err(Error::Config("spherical product needs n >= 2 and k >= 1"));
    }
    let mut factors = Vec::with_capacity(k);
    for _ in 0..k {
        let a = sample_ginibre(n, rng);
        let b = sample_ginibre(n, rng);
        let f = match a.right_divide(&b) {
            Ok(f) => f,
            Err(Error::Singular) => a.right_divide(&sample_ginibre(n, rng))?,
            Err(e) => return Err(e),
        };
        factors.push(f);
    }
    Ok(multiply_all(factors))
}

/// Spherical product from explicit `(A_j, B_j)` factor pairs.
pub fn spherical_product_from_factors(pairs: &[(RealMatrix, RealMatrix)]) -> Result<RealMatrix> {
    if pairs.is_empty() {
        return Err(Error::Config("need at least one factor pair"));
    }
    let factors = pairs
        .iter()
        .map(|(a, b)| a.right_divide(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(multiply_all(factors))
}

fn multiply_all(factors: Vec<RealMatrix>) -> RealMatrix {
    let mut it = factors.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, |acc, f| acc.matmul(&f))
}

/// Excitatory/inhibitory columns with zero column sums and zero means.
pub fn sample_rajan_abbott<R: Rng + ?Sized>(n: usize, p: &RajanAbbottParams, rng: &mut R) -> Result<RealMatrix> {
    p.validate()?;
    let ne = p.excitatory_count(n);
    if ne == 0 || ne >= n {
        return Err(Error::Config("round(f_e * n) must lie in [1, n - 1]"));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let col_std: Vec<f64> = (0..n)
        .map(|j| if j < ne { p.sigma_e * scale } else { p.sigma_i * scale })
        .collect();
    let mut w = RealMatrix::from_fn(n, |_, j| col_std[j] * rng.sample::<f64, _>(StandardNormal));
    let mut means = alloc::vec![0.0; n];
    for i in 0..n {
        for (m, v) in means.iter_mut().zip(w.row(i)) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let data = w.as_mut_slice();
    for row in data.chunks_exact_mut(n) {
        for (v, m) in row.iter_mut().zip(&means) {
            *v -= m;
        }
    }
    Ok(w)
}

/// `diag(+1 × n/2, −1 × n/2) + G` with `G_ij ~ N(0, t/n)`.
pub fn sample_ginibre_diffusion<R: Rng + ?Sized>(n: usize, p: &DiffusionParams, rng: &mut R) -> Result<RealMatrix> {
    if n % 2 != 0 {
        return Err(Error::Config("ginibre diffusion needs even n"));
    }
    if !(p.t > 0.0) || !p.t.is_finite() {
        return Err(Error::Config("diffusion time t must be positive"));
    }
    let mut x = gaussian_matrix(n, (p.t / n as f64).sqrt(), rng);
    for i in 0..n {
        x[(i, i)] += if i < n / 2 { 1.0 } else { -1.0 };
    }
    Ok(x)
}

/// Adjacency matrix of a simple k-regular digraph without self-loops.
///
/// Sums `k` independent uniform permutation matrices and rejects the whole
/// draw unless every permutation is fixed-point free and no edge repeats.
pub fn sample_regular_digraph<R: Rng + ?Sized>(
    n: usize,
    p: &GraphParams,
    max_attempts: usize,
    rng: &mut R,
) -> Result<RealMatrix> {
    let k = p.k;
    if k < 2 || k >= n {
        return Err(Error::Config("regular digraph needs 2 <= k < n"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut targets: Vec<usize> = Vec::with_capacity(n * k);
    for _ in 0..max_attempts {
        targets.clear();
        let mut ok = true;
        for _ in 0..k {
            perm.shuffle(rng);
            if perm.iter().enumerate().any(|(i, &j)| i == j) {
                ok = false;
                break;
            }
            // targets holds the accepted permutations back to back.
            let m = targets.len() / n;
            if (0..n).any(|i| (0..m).any(|r| targets[r * n + i] == perm[i])) {
                ok = false;
                break;
            }
            targets.extend_from_slice(&perm);
        }
        if ok {
            let mut a = RealMatrix::zeros(n);
            for r in 0..k {
                for i in 0..n {
                    a[(i, targets[r * n + i])] = 1.0;
                }
            }
            return Ok(a);
        }
    }
    Err(Error::SamplingExhausted { attempts: max_attempts })
}
