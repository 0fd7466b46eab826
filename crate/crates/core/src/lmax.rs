//! Approximating the density of the largest eigenvalue of `W̃(m, n)`.
//!
//! Integrating out all but the top eigenvalue of the joint density and
//! bounding `(λ − λᵢ)² ≤ λ²` gives
//!
//! ```text
//! f_max(λ) ≤ (2σ²)^(−n−m+1) λ^(n+m−2) e^(−λ/2σ²) / (Γ(n) Γ(m))
//! ```
//!
//! whose mass is `Γ(n+m−1) / (Γ(n) Γ(m))`. Normalizing gives the gamma density
//! `g`, and shifting `g` right by a fitted `d₁(m, n)` gives `φ`, a close
//! approximation of the true density. The shift is a least-squares plane in
//! `(m, n)` fitted to observed mode differences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::rmt::{lmax_samples, WishartSpec};
use crate::special::ln_gamma_int;

fn check_dims(m: usize, n: usize, sigma2: f64) -> Result<()> {
    if m == 0 || n < m {
        return Err(Error::invalid(format!("need n >= m >= 1, got m={m}, n={n}")));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(())
}

/// `ln[(2σ²)^(−k−1) λ^k e^(−λ/2σ²)]` with `k = n+m−2`, the common kernel.
fn ln_kernel(lambda: f64, k: u64, sigma2: f64) -> f64 {
    let two_s2 = 2.0 * sigma2;
    let power = if k == 0 { 0.0 } else { k as f64 * lambda.ln() };
    power - (k + 1) as f64 * two_s2.ln() - lambda / two_s2
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(())
}

/// Upper bound on the density of the largest eigenvalue of `W̃(m, n)`.
pub fn lmax_pdf_bound(lambda: f64, m: usize, n: usize, sigma2: f64) -> Result<f64> {
    check_dims(m, n, sigma2)?;
    check_lambda(lambda)?;
    let k = (n + m - 2) as u64;
    let ln_norm = ln_gamma_int(n as u64)? + ln_gamma_int(m as u64)?;
    Ok((ln_kernel(lambda, k, sigma2) - ln_norm).exp())
}

/// The bound normalized to a probability density: a gamma density with shape
/// `n+m−1` and scale `2σ²`.
pub fn g_pdf(lambda: f64, m: usize, n: usize, sigma2: f64) -> Result<f64> {
    check_dims(m, n, sigma2)?;
    check_lambda(lambda)?;
    let k = (n + m - 2) as u64;
    Ok((ln_kernel(lambda, k, sigma2) - ln_gamma_int(k + 1)?).exp())
}

/// `∫ bound = Γ(n+m−1) / (Γ(n) Γ(m))`.
pub fn bound_mass(m: usize, n: usize) -> Result<f64> {
    check_dims(m, n, 1.0)?;
    let (m, n) = (m as u64, n as u64);
    Ok((ln_gamma_int(n + m - 1)? - ln_gamma_int(n)? - ln_gamma_int(m)?).exp())
}

/// Mode of `g`: `2σ²(n+m−2)`.
pub fn g_mode(m: usize, n: usize, sigma2: f64) -> Result<f64> {
    check_dims(m, n, sigma2)?;
    if n + m <= 2 {
        return Err(Error::invalid("g is monotone for m = n = 1 and has no interior mode"));
    }
    Ok(2.0 * sigma2 * (n + m - 2) as f64)
}

/// Plane `a·m + b·n + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PlaneCoefficients {
    pub fn eval(&self, m: f64, n: f64) -> f64 {
        self.a * m + self.b * n + self.c
    }
}

/// The translation plane as published, fitted at σ² = 1.
pub const D1_PLANE: PlaneCoefficients = PlaneCoefficients {
    a: 2.53573,
    b: 0.574893,
    c: -5.40273,
};

/// Fitted translation `d₁(m, n)`.
pub fn d1(m: usize, n: usize) -> f64 {
    D1_PLANE.eval(m as f64, n as f64)
}

/// `g` shifted right by `shift`, zero to the left of it.
///
/// When the fitted shift is negative (dimensions below the fit's range) the
/// shift falls back to zero and `in_fit_domain` is cleared.
///
/// The shift is used as fitted at σ² = 1 regardless of `sigma2`; only the
/// gamma part scales with the variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslatedDensity {
    pub m: usize,
    pub n: usize,
    pub sigma2: f64,
    pub shift: f64,
    pub in_fit_domain: bool,
}

impl TranslatedDensity {
    /// `φ` with the fitted shift `d₁(m, n)`.
    pub fn fitted(m: usize, n: usize, sigma2: f64) -> Result<Self> {
        check_dims(m, n, sigma2)?;
        let d = d1(m, n);
        Ok(TranslatedDensity {
            m,
            n,
            sigma2,
            shift: d.max(0.0),
            in_fit_domain: d >= 0.0,
        })
    }

    pub fn with_shift(m: usize, n: usize, sigma2: f64, shift: f64) -> Result<Self> {
        check_dims(m, n, sigma2)?;
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::invalid(format!("shift must be finite and >= 0, got {shift}")));
        }
        Ok(TranslatedDensity {
            m,
            n,
            sigma2,
            shift,
            in_fit_domain: true,
        })
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t.is_nan() || t < self.shift {
            return 0.0;
        }
        g_pdf(t - self.shift, self.m, self.n, self.sigma2).expect("validated at construction")
    }

    pub fn mode(&self) -> Result<f64> {
        Ok(g_mode(self.m, self.n, self.sigma2)? + self.shift)
    }
}

/// `φ(t)` with the fitted shift.
pub fn phi_pdf(t: f64, m: usize, n: usize, sigma2: f64) -> Result<f64> {
    check_lambda(t)?;
    Ok(TranslatedDensity::fitted(m, n, sigma2)?.pdf(t))
}

/// One observation for the translation fit: `mu` is the exact mode minus the
/// mode of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationFitRow {
    pub m: usize,
    pub n: usize,
    pub mu: f64,
}

/// Published modes at σ² = 1: `(m, n, exact mode, mode of g, difference)`.
///
/// The `W̃(2,22)` difference is printed as 12.58 although 52.58 − 44 = 8.58;
/// the printed value is kept because the published fit was computed from it.
pub const TABLE_II: [(usize, usize, f64, f64, f64); 14] = [
    (2, 2, 5.11, 4.0, 1.1),
    (2, 3, 7.89, 6.0, 1.89),
    (2, 4, 10.53, 8.0, 2.53),
    (2, 15, 36.7, 30.0, 6.7),
    (2, 22, 52.58, 44.0, 12.58),
    (3, 3, 11.22, 8.0, 3.22),
    (3, 5, 17.24, 12.0, 5.24),
    (3, 13, 38.52, 28.0, 10.52),
    (3, 25, 67.79, 52.0, 15.79),
    (4, 4, 17.76, 12.0, 5.76),
    (4, 7, 27.15, 18.0, 9.15),
    (4, 13, 44.06, 30.0, 14.06),
    (5, 5, 24.53, 16.0, 8.53),
    (5, 9, 37.6, 24.0, 13.6),
];

/// Published hand-tuned translations: `(m, n, translation, mode of φ)`.
pub const TABLE_I: [(usize, usize, f64, f64); 14] = [
    (2, 2, 1.0, 5.0),
    (2, 3, 1.7, 7.7),
    (2, 4, 2.4, 10.4),
    (2, 15, 6.7, 36.7),
    (2, 22, 8.7, 52.7),
    (3, 3, 3.2, 11.2),
    (3, 5, 5.1, 17.1),
    (3, 13, 10.4, 38.4),
    (3, 25, 16.0, 68.0),
    (4, 4, 5.5, 17.5),
    (4, 7, 9.0, 27.0),
    (4, 13, 14.0, 44.0),
    (5, 5, 8.4, 24.4),
    (5, 9, 13.2, 37.2),
];

/// Published values of `d₁(m, n)`.
pub const TABLE_III: [(usize, usize, f64); 14] = [
    (2, 2, 0.8185),
    (2, 3, 1.3934),
    (2, 4, 1.9683),
    (2, 15, 8.2921),
    (2, 22, 12.3164),
    (3, 3, 3.9291),
    (3, 5, 5.0789),
    (3, 13, 9.6780),
    (3, 25, 16.5768),
    (4, 4, 7.0397),
    (4, 7, 8.7644),
    (4, 13, 12.2138),
    (5, 5, 10.1504),
    (5, 9, 12.45),
];

/// Fit rows from [`TABLE_II`]'s difference column.
pub fn table_ii_rows() -> Vec<TranslationFitRow> {
    TABLE_II
        .iter()
        .map(|&(m, n, _, _, mu)| TranslationFitRow { m, n, mu })
        .collect()
}

/// The 3×3 system `∇F = 0` for `F(a,b,c) = Σ (a mᵢ + b nᵢ + c − μᵢ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalEquations {
    pub matrix: [[f64; 3]; 3],
    pub rhs: [f64; 3],
}

impl NormalEquations {
    pub fn assemble(rows: &[TranslationFitRow]) -> Self {
        let mut matrix = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for r in rows {
            let x = [r.m as f64, r.n as f64, 1.0];
            for i in 0..3 {
                for j in 0..3 {
                    matrix[i][j] += x[i] * x[j];
                }
                rhs[i] += x[i] * r.mu;
            }
        }
        NormalEquations { matrix, rhs }
    }

    /// Largest absolute residual of `matrix · coeffs − rhs`.
    pub fn residual(&self, p: &PlaneCoefficients) -> f64 {
        let x = [p.a, p.b, p.c];
        (0..3)
            .map(|i| ((0..3).map(|j| self.matrix[i][j] * x[j]).sum::<f64>() - self.rhs[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Gaussian elimination with partial pivoting.
    pub fn solve(&self) -> Result<PlaneCoefficients> {
        let mut a = self.matrix;
        let mut b = self.rhs;
        let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::DegenerateFit("empty normal matrix".into()));
        }
        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .expect("non-empty range");
            if a[pivot][col].abs() <= 1e-12 * scale {
                return Err(Error::DegenerateFit(
                    "normal matrix is singular (rows are collinear or too few)".into(),
                ));
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in (col + 1)..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for i in (0..3).rev() {
            let tail: f64 = ((i + 1)..3).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - tail) / a[i][i];
        }
        Ok(PlaneCoefficients {
            a: x[0],
            b: x[1],
            c: x[2],
        })
    }
}

/// Least-squares plane through `(mᵢ, nᵢ, μᵢ)`.
pub fn fit_translation_plane(rows: &[TranslationFitRow]) -> Result<PlaneCoefficients> {
    if rows.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 rows, got {}", rows.len())));
    }
    NormalEquations::assemble(rows).solve()
}

/// Goodness-of-fit figures for a translation plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub mean_mu: f64,
    /// `Σ (μᵢ − μ̄)²`
    pub total_variation: f64,
    /// `Σ (d(mᵢ, nᵢ) − μ̄)²`
    pub explained_variation: f64,
    /// `Σ (μᵢ − d(mᵢ, nᵢ))²`
    pub residual_variation: f64,
    /// `explained / total`
    pub r_squared: f64,
}

/// Coefficient of determination of `coeffs` on `rows`.
pub fn fit_r_squared(rows: &[TranslationFitRow], coeffs: &PlaneCoefficients) -> Result<FitDiagnostics> {
    if rows.is_empty() {
        return Err(Error::DegenerateFit("no rows".into()));
    }
    let mean_mu = rows.iter().map(|r| r.mu).sum::<f64>() / rows.len() as f64;
    let total_variation: f64 = rows.iter().map(|r| (r.mu - mean_mu).powi(2)).sum();
    if total_variation == 0.0 {
        return Err(Error::DegenerateFit("observations have zero variation".into()));
    }
    let fitted = |r: &TranslationFitRow| coeffs.eval(r.m as f64, r.n as f64);
    let explained_variation: f64 = rows.iter().map(|r| (fitted(r) - mean_mu).powi(2)).sum();
    let residual_variation: f64 = rows.iter().map(|r| (r.mu - fitted(r)).powi(2)).sum();
    Ok(FitDiagnostics {
        mean_mu,
        total_variation,
        explained_variation,
        residual_variation,
        r_squared: explained_variation / total_variation,
    })
}

/// `∫₀^hi |f₁ − f₂|` by adaptive quadrature.
pub fn l1_density_distance<F1, F2>(f1: F1, f2: F2, hi: f64, tol: f64) -> Result<f64>
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    if !(hi > 0.0 && hi.is_finite()) {
        return Err(Error::invalid("upper limit must be finite and positive"));
    }
    Ok(integrate_adaptive(|t| (f1(t) - f2(t)).abs(), 0.0, hi, tol)?.value)
}

/// Bandwidth rule for [`KernelDensity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// `0.9 · min(s, IQR/1.34) · N^(−1/5)`, tuned for the density itself.
    Silverman,
    /// `1.06 · min(s, IQR/1.34) · N^(−1/7)`, the rate suited to locating the mode.
    ModeOptimal,
}

/// Gaussian kernel density estimate, binned onto a grid of spacing `h/10`
/// and linearly interpolated between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDensity {
    pub bandwidth: f64,
    grid_lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl KernelDensity {
    pub fn from_samples(samples: &[f64], rule: Bandwidth) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("kernel density needs at least two samples"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("samples must be finite"));
        }
        let n = samples.len() as f64;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / n;
        let sd = (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
        if !(spread > 0.0) {
            return Err(Error::invalid("samples have zero spread"));
        }
        let bandwidth = match rule {
            Bandwidth::Silverman => 0.9 * spread * n.powf(-0.2),
            Bandwidth::ModeOptimal => 1.06 * spread * n.powf(-1.0 / 7.0),
        };

        let step = bandwidth / 10.0;
        let reach = 5.0 * bandwidth;
        let grid_lo = sorted[0] - reach;
        let len = ((sorted[sorted.len() - 1] + reach - grid_lo) / step).ceil() as usize + 1;

        // Linear binning.
        let mut weights = vec![0.0; len];
        for &x in &sorted {
            let pos = (x - grid_lo) / step;
            let i = (pos.floor() as usize).min(len - 2);
            let frac = pos - i as f64;
            weights[i] += 1.0 - frac;
            weights[i + 1] += frac;
        }

        let half = (reach / step).ceil() as usize;
        let kernel: Vec<f64> = (0..=half)
            .map(|k| {
                let u = k as f64 * step / bandwidth;
                (-0.5 * u * u).exp()
            })
            .collect();
        let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
        let mut values = vec![0.0; len];
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let start = i.saturating_sub(half);
            let end = (i + half).min(len - 1);
            for (j, v) in values.iter_mut().enumerate().take(end + 1).skip(start) {
                *v += w * kernel[i.abs_diff(j)];
            }
        }
        for v in &mut values {
            *v *= norm;
        }
        Ok(KernelDensity {
            bandwidth,
            grid_lo,
            step,
            values,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.grid_lo) / self.step;
        if !(pos >= 0.0) || pos >= (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Right end of the support of the estimate.
    pub fn upper(&self) -> f64 {
        self.grid_lo + (self.values.len() - 1) as f64 * self.step
    }

    /// Grid argmax refined by a parabola through its neighbours.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let x = self.grid_lo + i as f64 * self.step;
        if i == 0 || i + 1 == self.values.len() {
            return x;
        }
        let (l, c, r) = (self.values[i - 1], self.values[i], self.values[i + 1]);
        let denom = l - 2.0 * c + r;
        if denom >= 0.0 {
            return x;
        }
        x + 0.5 * self.step * (l - r) / denom
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Mode of the largest-eigenvalue density, estimated from `trials` draws.
pub fn empirical_mode(spec: &WishartSpec, trials: usize, seed: u64) -> Result<f64> {
    if trials < 100_000 {
        return Err(Error::invalid(format!("mode estimation needs >= 1e5 trials, got {trials}")));
    }
    let samples = lmax_samples(spec, trials, seed);
    Ok(KernelDensity::from_samples(&samples, Bandwidth::ModeOptimal)?.mode())
}

/// Outcome of the translation grid search for one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationSearch {
    pub translation: f64,
    pub mode: f64,
    pub l1_distance: f64,
    pub l1_untranslated: f64,
}

/// Grid search over shifts `0, 0.1, …, 20` minimizing the L1 distance between
/// `g` shifted and a kernel density of `trials` largest-eigenvalue draws.
pub fn best_translation(spec: &WishartSpec, trials: usize, seed: u64) -> Result<TranslationSearch> {
    let samples = lmax_samples(spec, trials, seed);
    let kde = KernelDensity::from_samples(&samples, Bandwidth::Silverman)?;
    best_translation_against(spec, |t| kde.eval(t), kde.upper())
}

/// As [`best_translation`] against an arbitrary reference density supported in `[0, support_hi]`.
pub fn best_translation_against<F: Fn(f64) -> f64>(
    spec: &WishartSpec,
    reference: F,
    support_hi: f64,
) -> Result<TranslationSearch> {
    let (m, n, s2) = (spec.m(), spec.n(), spec.sigma2());
    let distance = |shift: f64| -> Result<f64> {
        let phi = TranslatedDensity::with_shift(m, n, s2, shift)?;
        // Beyond both supports the integrand is the gamma tail, negligible past 60σ of it.
        let tail = phi.mode()? + 60.0 * (2.0 * s2) * ((n + m - 1) as f64).sqrt();
        let hi = support_hi.max(tail);
        l1_density_distance(&reference, |t| phi.pdf(t), hi, 1e-5)
    };
    let mut best = (0.0, f64::INFINITY);
    for step in 0..=200 {
        let shift = step as f64 * 0.1;
        let d = distance(shift)?;
        if d < best.1 {
            best = (shift, d);
        }
    }
    Ok(TranslationSearch {
        translation: best.0,
        mode: g_mode(m, n, s2)? + best.0,
        l1_distance: best.1,
        l1_untranslated: distance(0.0)?,
    })
}
