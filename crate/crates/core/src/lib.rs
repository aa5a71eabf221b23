//! Sampling, spectra and analytic densities for real asymmetric random matrices.
//!
//! The density of purely real eigenvalues of a large real random matrix is
//! proportional to the square root of the density of complex eigenvalues
//! continued to the real axis. This crate carries everything needed to test
//! that statement numerically without any IO:
//!
//! * [`ensembles`]: seeded samplers for Ginibre, spherical products,
//!   Rajan–Abbott connectivity, Ginibre diffusion and regular digraphs.
//! * [`eigen`]: a real Schur (Hessenberg + Francis double shift) eigenvalue
//!   solver that classifies real eigenvalues from the block structure.
//! * [`schur_lab`]: partial real Schur decompositions and their Jacobians.
//! * [`densities`]: the analytic density catalog with its normalizations.
//! * [`verify`]: histogram estimators, the square-root fit and scoring.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod densities;
pub mod eigen;
pub mod ensembles;
mod error;
pub mod histogram;
pub mod matrix;
pub mod numeric;
pub mod schur_lab;
pub mod spectrum;
pub mod verify;

pub use densities::{DensityCurve, DensityModel, DensityValue, Prediction};
pub use eigen::{compute_spectrum, count_real, EigenReport};
pub use ensembles::{EnsembleKind, EnsembleSpec, RngStream};
pub use error::{Error, Result};
pub use histogram::{Histogram1D, Normalization};
pub use matrix::RealMatrix;
pub use spectrum::Spectrum;
