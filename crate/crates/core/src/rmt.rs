//! Complex Gaussian and Wishart ensembles.
//!
//! `W̃(m, n)` is the law of `M = A A*` where `A` is `m × n` with independent
//! entries `x + iy`, `x, y ~ N(0, σ²)`. The ordered eigenvalues of `M` have
//! joint density
//!
//! ```text
//! f(λ) = K exp(−Σλᵢ / 2σ²) Π λᵢ^(n−m) Π_{i<j} (λᵢ − λⱼ)²
//! K⁻¹  = (2σ²)^(mn) Π_{i=1..m} Γ(n−i+1) Γ(m−i+1)
//! ```
//!
//! which is evaluated in log space throughout.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::eigen::jacobi_eigenvalues;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::{Domain, StreamFamily};
use crate::special::ln_gamma_int;

/// Relative tolerance for hermiticity checks, scaled by the largest entry.
const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues down to `−PSD_SLACK · trace` are rounding noise.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WishartSpec {
    m: usize,
    n: usize,
    sigma2: f64,
}

impl WishartSpec {
    pub fn new(m: usize, n: usize, sigma2: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("Wishart dimensions must be positive"));
        }
        if n < m {
            return Err(Error::invalid(format!("Wishart W({m},{n}) needs n >= m")));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(WishartSpec { m, n, sigma2 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `ln K̃ₙ,ₘ`, the log of the joint eigenvalue density's normalizer.
    pub fn ln_normalizer(&self) -> f64 {
        let (m, n) = (self.m as u64, self.n as u64);
        let mut ln_inv = (m * n) as f64 * (2.0 * self.sigma2).ln();
        for i in 1..=m {
            ln_inv += ln_gamma_int(n - i + 1).expect("n >= m >= i")
                + ln_gamma_int(m - i + 1).expect("m >= i");
        }
        -ln_inv
    }
}

/// Eigenvalues of a Hermitian positive semidefinite matrix, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    /// Validates ordering and nonnegativity. Values in `[−slack, 0)` are clamped.
    pub fn new(values: Vec<f64>, slack: f64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalues must be sorted descending"));
        }
        if let Some(&v) = values.iter().find(|&&v| v < -slack) {
            return Err(Error::invalid(format!("eigenvalue {v} is negative beyond slack {slack}")));
        }
        Ok(EigenSpectrum {
            values: values.into_iter().map(|v| v.max(0.0)).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Draws an `m × n` complex Gaussian matrix whose entries have independent
/// real and imaginary parts, each `N(0, sigma2)`.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(m: usize, n: usize, sigma2: f64, rng: &mut R) -> Result<ComplexMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("Gaussian matrix dimensions must be positive"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(gaussian_unchecked(m, n, sigma2.sqrt(), rng))
}

pub(crate) fn gaussian_unchecked<R: Rng + ?Sized>(m: usize, n: usize, sd: f64, rng: &mut R) -> ComplexMatrix {
    let data = (0..m * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * re, sd * im)
        })
        .collect();
    ComplexMatrix::from_vec(m, n, data).expect("finite normals")
}

/// `M = A A*`.
pub fn wishart_from(a: &ComplexMatrix) -> ComplexMatrix {
    a.gram()
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let defect = m
        .hermitian_defect()
        .ok_or_else(|| Error::invalid(format!("matrix {}x{} is not square", m.rows(), m.cols())))?;
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::invalid(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix, descending, without a sign check.
pub fn hermitian_eigenvalues_signed(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    jacobi_eigenvalues(m)
}

/// Eigenvalues of a Hermitian positive semidefinite matrix.
///
/// Values in `[−1e−9·trace, 0)` are rounding noise and clamped to zero; more
/// negative values are a numeric failure.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<EigenSpectrum> {
    let values = hermitian_eigenvalues_signed(m)?;
    let slack = PSD_SLACK * m.trace().re.abs();
    if let Some(&v) = values.iter().find(|&&v| v < -slack) {
        return Err(Error::numeric(format!("eigenvalue {v} below PSD slack {slack:e}"), Some(v)));
    }
    EigenSpectrum::new(values, slack)
}

/// Log of the joint eigenvalue density; `−∞` where the density vanishes.
pub fn ln_joint_eigen_pdf(spectrum: &EigenSpectrum, spec: &WishartSpec) -> Result<f64> {
    let lambda = spectrum.values();
    if lambda.len() != spec.m {
        return Err(Error::invalid(format!(
            "spectrum has {} values but W({},{}) has {}",
            lambda.len(),
            spec.m,
            spec.n,
            spec.m
        )));
    }
    let two_s2 = 2.0 * spec.sigma2;
    let power = (spec.n - spec.m) as f64;
    let mut ln_f = spec.ln_normalizer() - lambda.iter().sum::<f64>() / two_s2;
    if power > 0.0 {
        ln_f += power * lambda.iter().map(|l| l.ln()).sum::<f64>();
    }
    for i in 0..lambda.len() {
        for j in (i + 1)..lambda.len() {
            ln_f += 2.0 * (lambda[i] - lambda[j]).abs().ln();
        }
    }
    Ok(if ln_f.is_nan() { f64::NEG_INFINITY } else { ln_f })
}

/// Joint density of the ordered eigenvalues of a `W̃(m, n)` matrix.
pub fn joint_eigen_pdf(spectrum: &EigenSpectrum, spec: &WishartSpec) -> Result<f64> {
    Ok(ln_joint_eigen_pdf(spectrum, spec)?.exp())
}

/// Largest eigenvalue of one `W̃(m, n)` draw from `rng`.
pub fn sample_lmax<R: Rng + ?Sized>(spec: &WishartSpec, rng: &mut R) -> f64 {
    let a = gaussian_unchecked(spec.m, spec.n, spec.sigma2.sqrt(), rng);
    let ev = jacobi_eigenvalues(&a.gram()).expect("Jacobi converges on small Hermitian matrices");
    ev[0].max(0.0)
}

/// `trials` independent largest eigenvalues. Trial `t` uses stream `t` of
/// the Wishart domain, so the output does not depend on the thread count.
pub fn lmax_samples(spec: &WishartSpec, trials: usize, seed: u64) -> Vec<f64> {
    let family = StreamFamily::new(seed, Domain::Wishart);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_lmax(spec, &mut family.get(t)))
        .collect()
}

/// Fixed-width histogram normalized as a density against the total trial count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::invalid("histogram needs bins >= 1 and hi > lo"));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &x in samples {
            if x < lo || x > hi {
                continue;
            }
            let idx = (((x - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Histogram {
            lo,
            bin_width: width,
            counts,
            trials: samples.len() as u64,
        })
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.lo + (i as f64 + 0.5) * self.bin_width)
            .collect()
    }

    /// `count / (trials · width)`.
    pub fn densities(&self) -> Vec<f64> {
        let norm = self.trials as f64 * self.bin_width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Binomial standard error of each density value.
    pub fn std_errors(&self) -> Vec<f64> {
        let n = self.trials as f64;
        self.counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                (p * (1.0 - p) / n).sqrt() / self.bin_width
            })
            .collect()
    }

    /// Center of the fullest bin; ties go to the lowest bin.
    pub fn mode(&self) -> f64 {
        let (idx, _) = self
            .counts
            .iter()
            .enumerate()
            .fold((0, 0), |best, (i, &c)| if c > best.1 { (i, c) } else { best });
        self.lo + (idx as f64 + 0.5) * self.bin_width
    }
}

/// Density histogram of the largest eigenvalue over `[0, hi]`.
pub fn empirical_lmax_density(spec: &WishartSpec, trials: usize, bins: usize, hi: f64, seed: u64) -> Result<Histogram> {
    if trials < 1000 {
        return Err(Error::invalid(format!("need at least 1000 trials, got {trials}")));
    }
    if !(hi > 0.0) {
        return Err(Error::invalid("histogram upper limit must be positive"));
    }
    Histogram::from_samples(&lmax_samples(spec, trials, seed), 0.0, hi, bins)
}
