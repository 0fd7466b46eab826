//! Monte Carlo link simulation of `R = HC + N` with maximum-likelihood decoding.
//!
//! Trial `t` draws `H` from stream `(seed, Channel, t)` and `N` from stream
//! `(seed, Noise, t)`, both via [`sample_complex_gaussian`] with variances
//! `1/2` and `N₀/2`. Word-error trials pick the transmitted index from
//! `(seed, Message, t)` first. Results therefore do not depend on how trials
//! are spread across threads.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pep::{check_pair_shapes, pep_avg_closed, pep_given_h, ChannelParams, PepInputs};
use crate::rmt::sample_complex_gaussian;
use crate::rng::{Domain, StreamFamily};
use crate::stc::{spectral_norm, Codebook};

/// Per-dimension variance of the channel gains.
pub const CHANNEL_VARIANCE: f64 = 0.5;

/// Below this many errors the normal-approximation interval is unreliable.
pub const LOW_COUNT: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderNorm {
    Spectral,
    Frobenius,
}

impl DecoderNorm {
    fn distance(self, m: &ComplexMatrix) -> f64 {
        match self {
            DecoderNorm::Spectral => spectral_norm(m),
            DecoderNorm::Frobenius => m.frobenius_norm_sqr(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ChannelParams,
    pub norm: DecoderNorm,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(params: ChannelParams, norm: DecoderNorm, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        Ok(SimConfig {
            params,
            norm,
            trials,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub error_count: u64,
    pub trials: u64,
    pub rate: f64,
    /// Normal-approximation 95% half-width.
    pub ci95_halfwidth: f64,
    /// Set when fewer than [`LOW_COUNT`] errors were seen.
    pub low_count: bool,
}

impl SimResult {
    pub fn from_counts(error_count: u64, trials: u64) -> Self {
        let rate = error_count as f64 / trials as f64;
        SimResult {
            error_count,
            trials,
            rate,
            ci95_halfwidth: 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt(),
            low_count: error_count < LOW_COUNT,
        }
    }

    /// Standard error of the rate.
    pub fn std_error(&self) -> f64 {
        self.ci95_halfwidth / 1.96
    }
}

struct Draws {
    channel: StreamFamily,
    noise: StreamFamily,
    params: ChannelParams,
}

impl Draws {
    fn new(config: &SimConfig) -> Self {
        Draws {
            channel: StreamFamily::new(config.seed, Domain::Channel),
            noise: StreamFamily::new(config.seed, Domain::Noise),
            params: config.params,
        }
    }

    fn channel(&self, t: u64) -> ComplexMatrix {
        let p = &self.params;
        sample_complex_gaussian(p.n_r, p.n_t, CHANNEL_VARIANCE, &mut self.channel.get(t)).expect("validated params")
    }

    fn noise(&self, t: u64) -> ComplexMatrix {
        let p = &self.params;
        sample_complex_gaussian(p.n_r, p.l, p.n0 / 2.0, &mut self.noise.get(t)).expect("validated params")
    }
}

fn check_config(config: &SimConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    ChannelParams::new(config.params.n_t, config.params.n_r, config.params.l, config.params.n0)?;
    Ok(())
}

/// Empirical `P(C → E)`: how often the decoder prefers `E` when `C` was sent.
/// Ties count as errors.
pub fn simulate_pairwise(c: &ComplexMatrix, e: &ComplexMatrix, config: &SimConfig) -> Result<SimResult> {
    check_config(config)?;
    check_pair_shapes(c, e, &config.params)?;
    let draws = Draws::new(config);
    let norm = config.norm;
    let errors: u64 = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let h = draws.channel(t);
            let hc = &h * c;
            let r = &hc + &draws.noise(t);
            let to_e = norm.distance(&(&r - &(&h * e)));
            let to_c = norm.distance(&(&r - &hc));
            u64::from(to_e <= to_c)
        })
        .sum();
    Ok(SimResult::from_counts(errors, config.trials))
}

/// Empirical word error rate of full ML decoding over `book`. Ties are
/// resolved toward the lowest index other than the transmitted one.
pub fn simulate_word_error(book: &Codebook, config: &SimConfig) -> Result<SimResult> {
    check_config(config)?;
    let p = &config.params;
    if (book.n_t(), book.l()) != (p.n_t, p.l) {
        return Err(Error::invalid(format!(
            "codebook words are {}x{}, channel expects {}x{}",
            book.n_t(),
            book.l(),
            p.n_t,
            p.l
        )));
    }
    let draws = Draws::new(config);
    let message = StreamFamily::new(config.seed, Domain::Message);
    let words = book.words();
    let norm = config.norm;
    let errors: u64 = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let sent = message.get(t).random_range(0..words.len());
            let h = draws.channel(t);
            let r = &(&h * &words[sent]) + &draws.noise(t);
            let own = norm.distance(&(&r - &(&h * &words[sent])));
            let wrong = words
                .iter()
                .enumerate()
                .any(|(k, w)| k != sent && norm.distance(&(&r - &(&h * w))) <= own);
            u64::from(wrong)
        })
        .sum();
    Ok(SimResult::from_counts(errors, config.trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparison {
    pub empirical: SimResult,
    /// Average of the conditional PEP over the simulation's own channel draws.
    pub thm51_mean: f64,
    /// Closed-form channel-averaged PEP at `c = ‖E − C‖₂²`.
    pub thm56_value: f64,
}

/// Runs [`simulate_pairwise`] and evaluates both analytic expressions for the
/// same pair and channel draws.
pub fn compare_to_analytic(c: &ComplexMatrix, e: &ComplexMatrix, config: &SimConfig) -> Result<AnalyticComparison> {
    let empirical = simulate_pairwise(c, e, config)?;
    let draws = Draws::new(config);
    let conditional: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| pep_given_h(&draws.channel(t), c, e, &config.params))
        .collect::<Result<_>>()?;
    // Sequential sum keeps the mean independent of the thread count.
    let thm51_mean = conditional.iter().sum::<f64>() / config.trials as f64;
    let dist = spectral_norm(&e.try_sub(c)?).powi(2);
    let thm56_value = pep_avg_closed(&PepInputs::new(dist, &config.params)?, &config.params)?;
    Ok(AnalyticComparison {
        empirical,
        thm51_mean,
        thm56_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stc::{example_codebook, ExampleCode};

    fn quaternion_pair() -> (ComplexMatrix, ComplexMatrix) {
        let q = example_codebook(&ExampleCode::Quaternion).unwrap();
        (q.words()[0].clone(), q.words()[1].clone())
    }

    fn config(n0: f64, norm: DecoderNorm, trials: u64) -> SimConfig {
        SimConfig::new(ChannelParams::new(2, 2, 2, n0).unwrap(), norm, trials, 11).unwrap()
    }

    #[test]
    fn vanishing_noise_has_no_errors() {
        let (c, e) = quaternion_pair();
        let r = simulate_pairwise(&c, &e, &config(1e-6, DecoderNorm::Spectral, 10_000)).unwrap();
        assert!(r.rate < 1e-3, "{r:?}");
        assert!(r.low_count);
    }

    #[test]
    fn overwhelming_noise_is_a_coin_flip() {
        let (c, e) = quaternion_pair();
        let r = simulate_pairwise(&c, &e, &config(1e6, DecoderNorm::Frobenius, 100_000)).unwrap();
        assert!((r.rate - 0.5).abs() < 0.02, "{r:?}");
    }

    #[test]
    fn rejects_identical_pair_and_zero_trials() {
        let (c, _) = quaternion_pair();
        assert!(simulate_pairwise(&c, &c, &config(1.0, DecoderNorm::Spectral, 10)).is_err());
        assert!(SimConfig::new(ChannelParams::new(2, 2, 2, 1.0).unwrap(), DecoderNorm::Spectral, 0, 0).is_err());
    }

    #[test]
    fn word_error_vanishes_without_noise() {
        let q = example_codebook(&ExampleCode::Quaternion).unwrap();
        let r = simulate_word_error(&q, &config(1e-6, DecoderNorm::Spectral, 5_000)).unwrap();
        assert!(r.rate < 1e-3, "{r:?}");
    }

    #[test]
    fn analytic_comparison_is_reproducible() {
        let (c, e) = quaternion_pair();
        let cfg = config(1.0, DecoderNorm::Spectral, 2_000);
        let a = compare_to_analytic(&c, &e, &cfg).unwrap();
        let b = compare_to_analytic(&c, &e, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.thm51_mean));
    }

    #[test]
    fn counts_do_not_depend_on_thread_count() {
        let (c, e) = quaternion_pair();
        let cfg = config(1.0, DecoderNorm::Spectral, 3_000);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| simulate_pairwise(&c, &e, &cfg)).unwrap();
        let b = simulate_pairwise(&c, &e, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
