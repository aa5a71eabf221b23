//! Fixed-grid histograms with exact integer counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Binned counts on `[lo, hi)` with `bins` equal-width bins.
///
/// Values outside the interval are tallied in `below`/`above` rather than
/// dropped. `weight` counts the source matrices that fed the histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram1D {
    lo: OrderedBound,
    hi: OrderedBound,
    counts: Vec<u64>,
    below: u64,
    above: u64,
    weight: u64,
}

/// f64 wrapper so histograms can be `Eq`; bounds are validated finite.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
struct OrderedBound(f64);

impl Eq for OrderedBound {}

/// How [`Histogram1D::to_density`] scales counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// In-range counts integrate to one.
    UnitMass,
    /// Counts per matrix per unit length, divided by `count_scale`
    /// (typically the matrix dimension).
    PerMatrix { count_scale: f64 },
}

impl Histogram1D {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Config("histogram needs finite lo < hi"));
        }
        if bins == 0 {
            return Err(Error::Config("histogram needs at least one bin"));
        }
        Ok(Self {
            lo: OrderedBound(lo),
            hi: OrderedBound(hi),
            counts: vec![0; bins],
            below: 0,
            above: 0,
            weight: 0,
        })
    }

    /// Same grid, no counts.
    pub fn empty_like(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            counts: vec![0; self.counts.len()],
            below: 0,
            above: 0,
            weight: 0,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo.0
    }

    pub fn hi(&self) -> f64 {
        self.hi.0
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn below(&self) -> u64 {
        self.below
    }

    pub fn above(&self) -> u64 {
        self.above
    }

    /// Values that fell outside `[lo, hi)` on either side.
    pub fn overflow(&self) -> u64 {
        self.below + self.above
    }

    pub fn in_range_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.in_range_total() + self.overflow()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi.0 - self.lo.0) / self.bins() as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.bins() {
            self.hi.0
        } else {
            self.lo.0 + i as f64 * self.bin_width()
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.bins()).map(|i| self.lo.0 + (i as f64 + 0.5) * w).collect()
    }

    /// Index of the bin owning `value`, if in range.
    pub fn bin_of(&self, value: f64) -> Option<usize> {
        if !(value >= self.lo.0 && value < self.hi.0) {
            return None;
        }
        let i = ((value - self.lo.0) / self.bin_width()) as usize;
        Some(i.min(self.bins() - 1))
    }

    pub fn push(&mut self, value: f64) {
        match self.bin_of(value) {
            Some(i) => self.counts[i] += 1,
            None if value < self.lo.0 => self.below += 1,
            // NaN lands here too.
            None => self.above += 1,
        }
    }

    /// Records that `matrices` more source matrices contributed.
    pub fn add_weight(&mut self, matrices: u64) {
        self.weight += matrices;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.bins() == other.bins()
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        self.weight += other.weight;
        Ok(())
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.merge_from(other)?;
        Ok(out)
    }

    /// Density value per bin.
    pub fn to_density(&self, normalization: Normalization) -> Result<Vec<f64>> {
        let w = self.bin_width();
        let scale = match normalization {
            Normalization::UnitMass => {
                let total = self.in_range_total();
                if total == 0 {
                    return Err(Error::InsufficientData("empty histogram has no unit-mass density"));
                }
                total as f64 * w
            }
            Normalization::PerMatrix { count_scale } => {
                if self.weight == 0 {
                    return Err(Error::InsufficientData("histogram has zero weight"));
                }
                self.weight as f64 * w * count_scale
            }
        };
        Ok(self.counts.iter().map(|&c| c as f64 / scale).collect())
    }

    /// Overwrites the raw tallies; used when deserializing merged results.
    pub fn with_counts(mut self, counts: Vec<u64>, below: u64, above: u64, weight: u64) -> Result<Self> {
        if counts.len() != self.bins() {
            return Err(Error::ShapeMismatch);
        }
        self.counts = counts;
        self.below = below;
        self.above = above;
        self.weight = weight;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_insertion() {
        let mut h = Histogram1D::new(0.0, 1.0, 2).unwrap();
        h.push(0.25);
        assert_eq!(h.counts(), &[1, 0]);
        h.push(0.75);
        assert_eq!(h.counts(), &[1, 1]);
    }

    #[test]
    fn out_of_range_goes_to_overflow() {
        let mut h = Histogram1D::new(0.0, 1.0, 2).unwrap();
        h.push(1.5);
        assert_eq!(h.counts(), &[0, 0]);
        assert_eq!(h.overflow(), 1);
        h.push(-0.1);
        h.push(1.0);
        h.push(f64::NAN);
        assert_eq!((h.below(), h.above()), (1, 3));
    }

    #[test]
    fn merge_adds_counts() {
        let a = Histogram1D::new(0.0, 1.0, 2).unwrap().with_counts(vec![1, 0], 0, 0, 1).unwrap();
        let b = Histogram1D::new(0.0, 1.0, 2).unwrap().with_counts(vec![0, 2], 0, 1, 2).unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.counts(), &[1, 2]);
        assert_eq!(m.weight(), 3);
        assert_eq!(m.above(), 1);
        assert_eq!(a.merge(&a.empty_like()).unwrap(), a);
    }

    #[test]
    fn merge_rejects_other_grid() {
        let a = Histogram1D::new(0.0, 1.0, 2).unwrap();
        let b = Histogram1D::new(0.0, 1.0, 3).unwrap();
        assert_eq!(a.merge(&b), Err(Error::ShapeMismatch));
    }

    #[test]
    fn unit_mass_density() {
        let h = Histogram1D::new(0.0, 1.0, 2).unwrap();
        let d = h.clone().with_counts(vec![2, 2], 0, 0, 1).unwrap().to_density(Normalization::UnitMass).unwrap();
        assert_eq!(d, vec![1.0, 1.0]);
        let d = h.clone().with_counts(vec![3, 1], 0, 0, 1).unwrap().to_density(Normalization::UnitMass).unwrap();
        assert_eq!(d, vec![1.5, 0.5]);
        assert!(h.to_density(Normalization::UnitMass).is_err());
    }

    #[test]
    fn per_matrix_density() {
        let h = Histogram1D::new(0.0, 2.0, 2).unwrap().with_counts(vec![8, 4], 0, 0, 2).unwrap();
        let d = h.to_density(Normalization::PerMatrix { count_scale: 4.0 }).unwrap();
        assert_eq!(d, vec![1.0, 0.5]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Histogram1D::new(1.0, 1.0, 3).is_err());
        assert!(Histogram1D::new(0.0, 1.0, 0).is_err());
        assert!(Histogram1D::new(0.0, f64::INFINITY, 2).is_err());
    }

    fn hist_from(counts: Vec<u64>) -> Histogram1D {
        Histogram1D::new(-1.0, 1.0, counts.len()).unwrap().with_counts(counts, 0, 0, 1).unwrap()
    }

    proptest! {
        #[test]
        fn merge_is_associative_and_commutative(
            a in proptest::collection::vec(0u64..1000, 7),
            b in proptest::collection::vec(0u64..1000, 7),
            c in proptest::collection::vec(0u64..1000, 7),
        ) {
            let (a, b, c) = (hist_from(a), hist_from(b), hist_from(c));
            let left = a.merge(&b).unwrap().merge(&c).unwrap();
            let right = a.merge(&b.merge(&c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
        }

        #[test]
        fn unit_mass_integrates_to_one(
            counts in proptest::collection::vec(0u64..10_000, 1..64),
            lo in -10.0f64..0.0,
            width in 0.01f64..20.0,
        ) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let bins = counts.len();
            let h = Histogram1D::new(lo, lo + width, bins).unwrap().with_counts(counts, 0, 0, 1).unwrap();
            let d = h.to_density(Normalization::UnitMass).unwrap();
            let mass: f64 = d.iter().sum::<f64>() * h.bin_width();
            prop_assert!((mass - 1.0).abs() < 1e-12);
        }

        #[test]
        fn every_value_is_counted(values in proptest::collection::vec(-3.0f64..3.0, 0..200)) {
            let mut h = Histogram1D::new(-1.0, 1.0, 9).unwrap();
            for &v in &values {
                h.push(v);
            }
            prop_assert_eq!(h.total(), values.len() as u64);
        }
    }
}
