use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenvalues of one real `n×n` matrix.
///
/// Complex eigenvalues come in conjugate pairs; only the upper-half-plane
/// representative `x + iy` (with `y > 0`) is stored.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    pub(crate) n: usize,
    pub(crate) real_eigs: Vec<f64>,
    pub(crate) complex_pairs: Vec<(f64, f64)>,
}

impl Spectrum {
    /// Checks the cardinality identity and `y > 0` on every pair.
    pub fn new(n: usize, real_eigs: Vec<f64>, complex_pairs: Vec<(f64, f64)>) -> Result<Self> {
        if real_eigs.len() + 2 * complex_pairs.len() != n {
            return Err(Error::Config("spectrum cardinality does not match n"));
        }
        if complex_pairs.iter().any(|&(_, y)| !(y > 0.0)) {
            return Err(Error::Config("complex pair with non-positive imaginary part"));
        }
        Ok(Self { n, real_eigs, complex_pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real_eigs(&self) -> &[f64] {
        &self.real_eigs
    }

    /// Upper-half-plane representatives `(x, y)` of `x ± iy`.
    pub fn complex_pairs(&self) -> &[(f64, f64)] {
        &self.complex_pairs
    }

    /// All `n` eigenvalues, each conjugate pair expanded to `z, z̄`.
    pub fn eigenvalues(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.real_eigs
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .chain(
                self.complex_pairs
                    .iter()
                    .flat_map(|&(x, y)| [Complex64::new(x, y), Complex64::new(x, -y)]),
            )
    }

    /// `Σ λ`, always real.
    pub fn eigenvalue_sum(&self) -> f64 {
        self.real_eigs.iter().sum::<f64>() + 2.0 * self.complex_pairs.iter().map(|p| p.0).sum::<f64>()
    }

    /// Largest modulus among the complex pairs, if any.
    pub fn complex_radius(&self) -> Option<f64> {
        self.complex_pairs
            .iter()
            .map(|&(x, y)| x.hypot(y))
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }

    /// Largest modulus over the whole spectrum.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cardinality_is_checked() {
        assert!(Spectrum::new(3, vec![1.0], vec![(0.0, 1.0)]).is_ok());
        assert!(Spectrum::new(4, vec![1.0], vec![(0.0, 1.0)]).is_err());
        assert!(Spectrum::new(2, vec![], vec![(0.0, 0.0)]).is_err());
    }

    #[test]
    fn eigenvalues_expand_conjugates() {
        let s = Spectrum::new(3, vec![2.0], vec![(0.5, 1.0)]).unwrap();
        let all: Vec<_> = s.eigenvalues().collect();
        assert_eq!(all.len(), 3);
        assert_eq!(all[2], Complex64::new(0.5, -1.0));
        assert_eq!(s.eigenvalue_sum(), 3.0);
        assert_eq!(s.complex_radius(), Some(0.5f64.hypot(1.0)));
    }
}
