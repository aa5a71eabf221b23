//! Full spectra of real matrices via the real Schur form.
//!
//! A real eigenvalue is one that deflates as a 1×1 diagonal block; a complex
//! pair is a standardized 2×2 block with `b·c < 0`. Nothing is decided by
//! thresholding imaginary parts.

mod francis;
mod hessenberg;

use alloc::vec::Vec;


pub use francis::{standardize_2x2, SchurBlock, Standard2x2};
pub(crate) use hessenberg::householder;

use crate::{RealMatrix, Result, Spectrum};

/// Relative trace error above which a spectrum is flagged as suspect.
pub const TRACE_FLAG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub spectrum: Spectrum,
    /// `|Σλ − tr X| / (n·‖X‖_F)`, a cheap backward-error proxy.
    pub residual: f64,
    /// Wall-clock seconds, filled in by callers that have a clock.
    pub elapsed: Option<f64>,
}

impl EigenReport {
    pub fn is_flagged(&self) -> bool {
        !(self.residual <= TRACE_FLAG_THRESHOLD)
    }
}

/// Diagonal blocks of the real Schur form of `x`.
pub fn schur_blocks(x: &RealMatrix) -> Result<Vec<SchurBlock>> {
    let n = x.n();
    let mut h = x.as_slice().to_vec();
    hessenberg::reduce_to_hessenberg(&mut h, n);
    francis::hessenberg_eigenvalues(&mut h, n)
}

/// Eigenvalues of `x`, split into exact reals and conjugate pairs.
pub fn compute_spectrum(x: &RealMatrix) -> Result<EigenReport> {
    if !x.is_finite() {
        return Err(crate::Error::Domain("matrix entries must be finite"));
    }
    let n = x.n();
    let blocks = schur_blocks(x)?;
    let mut real = Vec::new();
    let mut pairs = Vec::new();
    let mut iter = blocks.into_iter();
    while let Some(b) = iter.next() {
        match b {
            SchurBlock::Real(v) => real.push(v),
            SchurBlock::Pair(re, im) => {
                // Pairs are emitted twice (once per eigenvalue).
                let _ = iter.next();
                pairs.push((re, im));
            }
        }
    }
    let spectrum = Spectrum::new(n, real, pairs)?;
    let scale = n as f64 * x.frobenius_norm();
    let residual = if scale > 0.0 {
        (spectrum.eigenvalue_sum() - x.trace()).abs() / scale
    } else {
        0.0
    };
    Ok(EigenReport { spectrum, residual, elapsed: None })
}

pub fn count_real(spectrum: &Spectrum) -> usize {
    spectrum.real_eigs().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn rotation_has_one_pair() {
        let r = compute_spectrum(&RealMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])).unwrap();
        assert!(r.spectrum.real_eigs().is_empty());
        assert_eq!(r.spectrum.complex_pairs(), &[(0.0, 1.0)]);
        assert_eq!(count_real(&r.spectrum), 0);
    }

    #[test]
    fn diagonal_is_real() {
        let r = compute_spectrum(&RealMatrix::from_rows(&[[1.0, 0.0], [0.0, -1.0]])).unwrap();
        assert_eq!(sorted(r.spectrum.real_eigs().to_vec()), [-1.0, 1.0]);
        assert!(r.spectrum.complex_pairs().is_empty());
    }

    #[test]
    fn symmetric_swap_is_real() {
        let r = compute_spectrum(&RealMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
        let e = sorted(r.spectrum.real_eigs().to_vec());
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_counts_all_real() {
        let r = compute_spectrum(&RealMatrix::identity(5)).unwrap();
        assert_eq!(count_real(&r.spectrum), 5);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(compute_spectrum(&RealMatrix::zeros(0)).unwrap().spectrum.n(), 0);
        let one = compute_spectrum(&RealMatrix::from_rows(&[[3.5]])).unwrap();
        assert_eq!(one.spectrum.real_eigs(), &[3.5]);
    }

    #[test]
    fn companion_matrix_roots() {
        // x³ − 6x² + 11x − 6 = (x−1)(x−2)(x−3).
        let c = RealMatrix::from_rows(&[[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let r = compute_spectrum(&c).unwrap();
        let e = sorted(r.spectrum.real_eigs().to_vec());
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_shift_block() {
        let mut m = RealMatrix::zeros(4);
        for i in 0..3 {
            m[(i, i + 1)] = 1.0;
        }
        let r = compute_spectrum(&m).unwrap();
        assert_eq!(r.spectrum.eigenvalue_sum(), 0.0);
    }
}
