//! Pairwise error probability of the spectral-norm ML decoder.
//!
//! With `C` sent, the decoder prefers `E` only if
//! `‖H(E−C)‖₂² / 4 ≤ λ_max(NN*)`. Modelling `λ_max(NN*)` by the translated
//! density `φ` (shift `d₁(n_R, l)`, scale `N₀`) gives the conditional PEP
//!
//! ```text
//! P(C→E | H) = 1                                      if ‖H(E−C)‖₂²/4 ≤ d₁
//!            = Q(l+n_R−1, (‖H(E−C)‖₂² − 4d₁) / 4N₀)   otherwise
//! ```
//!
//! Replacing `‖H(E−C)‖₂²` by `t·c` with `t = ‖H‖₂²`, `c = ‖E−C‖₂²`, and
//! averaging `t` over the translated density `ψ` of `λ_max(HH*)` (shift `d₂`,
//! unit scale) yields a one-dimensional integral. [`pep_avg_quadrature`]
//! evaluates it numerically; [`pep_avg_closed`] sums its closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmax::D1_PLANE;
use crate::matrix::ComplexMatrix;
use crate::quadrature::{integrate, Tolerance};
use crate::special::{binomial, hyp1f1_terminating, ln_gamma_int, pochhammer, regularized_q, regularized_q_unchecked};
use crate::stc::spectral_norm;

/// The channel-side translation plane. Its constant term differs from
/// [`D1_PLANE`] in the fourth decimal; both are kept as published.
pub const D2_PLANE: crate::lmax::PlaneCoefficients = crate::lmax::PlaneCoefficients {
    a: 2.53573,
    b: 0.574893,
    c: -5.402373,
};

/// Closed-form evaluations beyond this many outer terms are flagged as
/// poorly conditioned.
pub const STABLE_ORDER: usize = 8;

/// Coherent quasi-static MIMO link with unit transmit energy per antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub n_t: usize,
    pub n_r: usize,
    /// Frame length in symbol times.
    pub l: usize,
    /// Noise level; noise entries have variance `N₀/2` per real dimension.
    pub n0: f64,
}

impl ChannelParams {
    pub const ENERGY_PER_SYMBOL: f64 = 1.0;

    pub fn new(n_t: usize, n_r: usize, l: usize, n0: f64) -> Result<Self> {
        if n_t == 0 || n_r == 0 || l == 0 {
            return Err(Error::invalid("antenna counts and frame length must be >= 1"));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::invalid(format!("N0 must be positive, got {n0}")));
        }
        Ok(ChannelParams { n_t, n_r, l, n0 })
    }

    /// `d₁(n_R, l)`, the shift for the noise Wishart `NN*`.
    pub fn d1(&self) -> f64 {
        D1_PLANE.eval(self.n_r as f64, self.l as f64)
    }

    /// `d₂(n_R, n_T)`, the shift for the channel Wishart `HH*`.
    pub fn d2(&self) -> f64 {
        D2_PLANE.eval(self.n_r as f64, self.n_t as f64)
    }

    /// Shape of the regularized gamma in the conditional PEP, `l + n_R − 1`.
    pub fn noise_shape(&self) -> u64 {
        (self.l + self.n_r - 1) as u64
    }

    /// Power of `(t − d₂)` in `ψ`, `n_T + n_R − 2`.
    pub fn channel_power(&self) -> u64 {
        (self.n_t + self.n_r - 2) as u64
    }
}

/// Inputs to the channel-averaged PEP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PepInputs {
    /// Squared spectral distance `‖E − C‖₂²`.
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
}

impl PepInputs {
    /// Inputs with the published translations for `params`.
    pub fn new(c: f64, params: &ChannelParams) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::invalid(format!("squared distance must be >= 0, got {c}")));
        }
        Ok(PepInputs {
            c,
            d1: params.d1(),
            d2: params.d2(),
        })
    }

    /// Whether the "certain error" region `t ≤ 4d₁/c` lies left of `ψ`'s support,
    /// so the closed form and the branched integral coincide.
    pub fn branch_inactive(&self) -> bool {
        self.c > 0.0 && 4.0 * self.d1 / self.c <= self.d2
    }
}

/// Conditional PEP given the squared spectral norm `s = ‖H(E−C)‖₂²`.
pub fn pep_given_sq_norm(s: f64, params: &ChannelParams) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::invalid("squared norm must be >= 0"));
    }
    let d1 = params.d1();
    if s / 4.0 <= d1 {
        return Ok(1.0);
    }
    regularized_q(params.noise_shape(), (s - 4.0 * d1) / (4.0 * params.n0))
}

/// Conditional PEP `P(C → E | H)` under the translated noise model.
pub fn pep_given_h(h: &ComplexMatrix, c: &ComplexMatrix, e: &ComplexMatrix, params: &ChannelParams) -> Result<f64> {
    check_pair_shapes(c, e, params)?;
    if h.shape() != (params.n_r, params.n_t) {
        return Err(Error::invalid(format!(
            "H must be {}x{}, got {}x{}",
            params.n_r,
            params.n_t,
            h.rows(),
            h.cols()
        )));
    }
    let diff = e.try_sub(c)?;
    let s = spectral_norm(&h.try_mul(&diff)?).powi(2);
    pep_given_sq_norm(s, params)
}

pub(crate) fn check_pair_shapes(c: &ComplexMatrix, e: &ComplexMatrix, params: &ChannelParams) -> Result<()> {
    let want = (params.n_t, params.l);
    if c.shape() != want || e.shape() != want {
        return Err(Error::invalid(format!(
            "codewords must be {}x{}, got {:?} and {:?}",
            want.0,
            want.1,
            c.shape(),
            e.shape()
        )));
    }
    if c == e {
        return Err(Error::invalid("codewords must differ"));
    }
    Ok(())
}

/// Translated density of `λ_max(HH*)` for unit-variance complex channel gains.
pub fn psi_pdf(t: f64, n_r: usize, n_t: usize) -> f64 {
    if n_r == 0 || n_t == 0 {
        return 0.0;
    }
    let d2 = D2_PLANE.eval(n_r as f64, n_t as f64);
    if t.is_nan() || t < d2 {
        return 0.0;
    }
    let p = (n_t + n_r - 2) as u64;
    shifted_gamma(t - d2, p)
}

/// `s^p e^{−s} / Γ(p+1)`.
fn shifted_gamma(s: f64, p: u64) -> f64 {
    let ln_pow = if p == 0 { 0.0 } else { p as f64 * s.ln() };
    (ln_pow - s - ln_gamma_int(p + 1).expect("p + 1 >= 1")).exp()
}

fn check_avg_inputs(inputs: &PepInputs, params: &ChannelParams) -> Result<()> {
    ChannelParams::new(params.n_t, params.n_r, params.l, params.n0)?;
    if !(inputs.c > 0.0 && inputs.c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive, got {}", inputs.c)));
    }
    Ok(())
}

fn averaged_integral(inputs: &PepInputs, params: &ChannelParams, rel_tol: f64, branched: bool) -> Result<f64> {
    check_avg_inputs(inputs, params)?;
    if !(rel_tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let shape = params.noise_shape();
    let p = params.channel_power();
    let PepInputs { c, d1, d2 } = *inputs;
    let four_n0 = 4.0 * params.n0;
    let integrand = |s: f64| {
        let t = d2 + s;
        let x = (c * t - 4.0 * d1) / four_n0;
        let q = if branched && x <= 0.0 {
            1.0
        } else {
            regularized_q_unchecked(shape, x)
        };
        q * shifted_gamma(s, p)
    };
    let tol = Tolerance {
        abs: f64::MIN_POSITIVE,
        rel: rel_tol,
    };
    // The integrand decays like e^{−(1 + c/4N₀)s}; splitting at a few decay
    // lengths keeps the compactified tail well resolved.
    let split = 4.0 * ((p + 1) as f64) / (1.0 + c / four_n0);
    let head = integrate(integrand, 0.0, split, tol)?;
    let tail = integrate(integrand, split, f64::INFINITY, tol)?;
    Ok(head.value + tail.value)
}

/// Channel-averaged PEP by adaptive quadrature of
/// `∫_{d₂}^∞ P(C→E | t) ψ(t) dt`, with `P = 1` wherever `c·t ≤ 4d₁`.
///
/// `rel_tol` is a relative accuracy target.
pub fn pep_avg_quadrature(inputs: &PepInputs, params: &ChannelParams, rel_tol: f64) -> Result<f64> {
    averaged_integral(inputs, params, rel_tol, true)
}

/// As [`pep_avg_quadrature`] but integrating the finite-sum `Q` expression
/// over the whole range, which is what the closed form sums.
pub fn pep_avg_quadrature_unbranched(inputs: &PepInputs, params: &ChannelParams, rel_tol: f64) -> Result<f64> {
    averaged_integral(inputs, params, rel_tol, false)
}

/// `∫_{d₂}^∞ e^{−ct/4N₀} (ct − 4d₁)^i (t − d₂)^p e^{−t} dt` in closed form,
/// `p = n_T + n_R − 2`, as a binomial sum of terminating ₁F₁ values.
pub fn inner_integral_closed(i: u32, inputs: &PepInputs, params: &ChannelParams) -> Result<f64> {
    ChannelParams::new(params.n_t, params.n_r, params.l, params.n0)?;
    if inputs.c.is_nan() || inputs.c < 0.0 {
        return Err(Error::invalid("c must be >= 0"));
    }
    let PepInputs { c, d1, d2 } = *inputs;
    let four_n0 = 4.0 * params.n0;
    let beta = (four_n0 + c) / four_n0;
    let p = params.channel_power() as i64;
    let i = i as i64;
    let mut sum = 0.0;
    for j in 0..=i {
        let q = i - j;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let hyp = hyp1f1_terminating(-q, (-q - p) as f64, beta * d2)?;
        let ln_gamma = ln_gamma_int((q + p + 1) as u64)?;
        let term = sign
            * binomial(i as u64, j as u64)
            * c.powi(q as i32)
            * (4.0 * d1).powi(j as i32)
            * (ln_gamma - (q + p + 1) as f64 * beta.ln() - beta * d2).exp()
            * hyp;
        sum += term;
    }
    Ok(sum)
}

/// One term of the closed-form triple sum, stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedTerm {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

fn ln_abs_signed(x: f64) -> (f64, f64) {
    if x == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (x.signum(), x.abs().ln())
    }
}

/// Every term of the closed-form sum over `i ≤ l+n_R−2, j ≤ i, k ≤ i−j`.
pub fn closed_form_terms(inputs: &PepInputs, params: &ChannelParams) -> Result<Vec<SignedTerm>> {
    check_avg_inputs(inputs, params)?;
    let PepInputs { c, d1, d2 } = *inputs;
    let four_n0 = 4.0 * params.n0;
    let big_l = params.l + params.n_r - 2;
    let p = params.channel_power() as f64;
    let nt_nr = (params.n_t + params.n_r) as f64;

    let ln_inv_4n0 = -four_n0.ln();
    let ln_c = c.ln();
    let ln_4n0_c = (four_n0 + c).ln();
    let ln_exp = (-c * d2 + 4.0 * d1) / four_n0;
    let (s_d1, ln_4d1) = ln_abs_signed(4.0 * d1);
    let (s_d2, ln_d2) = ln_abs_signed(d2);

    let mut terms = Vec::with_capacity((0..=big_l).map(|i| (i + 1) * (i + 2) / 2).sum());
    for i in 0..=big_l {
        let ln_fact_i = ln_gamma_int(i as u64 + 1)?;
        for j in 0..=i {
            let (s_poch_up, ln_poch_up) = ln_abs_signed(pochhammer(nt_nr - 1.0, (i - j) as u64));
            let ln_binom = binomial(i as u64, j as u64).ln();
            for k in 0..=(i - j) {
                let num = pochhammer(j as f64 - i as f64, k as u64);
                let den = pochhammer(j as f64 - i as f64 - nt_nr + 2.0, k as u64);
                if den == 0.0 {
                    return Err(Error::numeric("denominator Pochhammer vanished", None));
                }
                let (s_ratio, ln_ratio) = ln_abs_signed(num / den);
                let jf = j as f64;
                let kf = k as f64;
                let qf = (i - j) as f64;
                let mut sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign *= s_poch_up * s_ratio;
                let mut ln_abs = (jf + kf - p - 1.0) * ln_inv_4n0 - ln_fact_i - ln_gamma_int(k as u64 + 1)?
                    + ln_binom
                    + ln_poch_up
                    + ln_ratio
                    + qf * ln_c
                    + (kf - qf - p - 1.0) * ln_4n0_c
                    + ln_exp;
                if j > 0 {
                    ln_abs += jf * ln_4d1;
                    if j % 2 == 1 {
                        sign *= s_d1;
                    }
                }
                if k > 0 {
                    ln_abs += kf * ln_d2;
                    if k % 2 == 1 {
                        sign *= s_d2;
                    }
                }
                terms.push(SignedTerm { i, j, k, sign, ln_abs });
            }
        }
    }
    Ok(terms)
}

/// Signed sum of log-magnitude terms, largest first, with Neumaier compensation.
pub fn compensated_sum(terms: &[SignedTerm]) -> f64 {
    let mut sorted: Vec<&SignedTerm> = terms.iter().filter(|t| t.ln_abs > f64::NEG_INFINITY).collect();
    sorted.sort_by(|a, b| b.ln_abs.total_cmp(&a.ln_abs));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in sorted {
        let v = t.value();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Closed-form value with conditioning information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormEvaluation {
    pub value: f64,
    pub term_count: usize,
    /// `Σ|term| / |Σ term|`; large values mean heavy cancellation.
    pub cancellation: f64,
    /// `l + n_R − 2 ≤ STABLE_ORDER`.
    pub within_stable_order: bool,
}

pub fn pep_avg_closed_detailed(inputs: &PepInputs, params: &ChannelParams) -> Result<ClosedFormEvaluation> {
    let terms = closed_form_terms(inputs, params)?;
    let value = compensated_sum(&terms);
    let magnitude: f64 = terms.iter().map(|t| t.ln_abs.exp()).sum();
    Ok(ClosedFormEvaluation {
        value,
        term_count: terms.len(),
        cancellation: if value == 0.0 { f64::INFINITY } else { magnitude / value.abs() },
        within_stable_order: params.l + params.n_r - 2 <= STABLE_ORDER,
    })
}

/// Channel-averaged PEP from its closed-form triple sum.
pub fn pep_avg_closed(inputs: &PepInputs, params: &ChannelParams) -> Result<f64> {
    Ok(pep_avg_closed_detailed(inputs, params)?.value)
}

/// The closed form next to both quadrature routes at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchComparison {
    pub closed: f64,
    pub quadrature: f64,
    pub quadrature_unbranched: f64,
    pub branch_inactive: bool,
    /// `|closed − quadrature| / quadrature`.
    pub relative_gap: f64,
}

pub fn compare_closed_to_quadrature(inputs: &PepInputs, params: &ChannelParams, rel_tol: f64) -> Result<BranchComparison> {
    let closed = pep_avg_closed(inputs, params)?;
    let quadrature = pep_avg_quadrature(inputs, params, rel_tol)?;
    let quadrature_unbranched = pep_avg_quadrature_unbranched(inputs, params, rel_tol)?;
    Ok(BranchComparison {
        closed,
        quadrature,
        quadrature_unbranched,
        branch_inactive: inputs.branch_inactive(),
        relative_gap: (closed - quadrature).abs() / quadrature.abs(),
    })
}
