//! Random-matrix tools for space-time code design under a spectral-norm
//! maximum-likelihood decoder.
//!
//! * [`rmt`]: complex Gaussian / Wishart sampling, Hermitian eigenvalues, the
//!   joint eigenvalue density and largest-eigenvalue histograms.
//! * [`special`] and [`quadrature`]: integer-argument incomplete gamma,
//!   terminating ₁F₁, Pochhammer symbols, and an adaptive Gauss–Kronrod
//!   integrator used as an oracle.
//! * [`lmax`]: the upper bound on the largest-eigenvalue density, its
//!   normalized and translated forms, and the least-squares translation plane.
//! * [`pep`]: conditional and channel-averaged pairwise error probabilities.
//! * [`stc`]: codebooks, matrix norms and the rank-determinant, trace and
//!   largest-eigenvalue design criteria.
//! * [`sim`]: Monte Carlo link simulation of `R = HC + N`.
//!
//! Randomness is counter-based (see [`rng`]): every experiment is a pure
//! function of its seed.

mod eigen;
pub mod error;
pub mod lmax;
pub mod matrix;
pub mod pep;
pub mod quadrature;
pub mod rmt;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stc;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use rmt::{EigenSpectrum, Histogram, WishartSpec};
pub use pep::ChannelParams;
pub use stc::{Codebook, CriterionReport};
