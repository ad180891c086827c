//! Monte-Carlo check that the closed-form rates lower-bound the ergodic
//! rate of i.i.d. Rayleigh channels with perfect CSI.
//!
//! Trial `t` draws its channel from a ChaCha8 stream keyed by `(seed, t)`,
//! so any partition of trials across threads yields the same numbers.
//! Trials are grouped into fixed-size chunks whose statistics are merged
//! in chunk order.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::link::{rate_achieved, AntennaConfig, Detector};

const CHUNK: u64 = 512;
const MAX_RESAMPLES: u64 = 64;
/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    pub detector: Detector,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("gamma", self.gamma)?;
        if self.k < 1 || self.m < 1 {
            return Err(Error::InvalidParameter {
                name: "m/k",
                value: self.m.min(self.k) as f64,
                reason: "antenna and user counts must be at least 1",
            });
        }
        if self.detector == Detector::Zf && self.m <= self.k {
            return Err(Error::InvalidParameter {
                name: "m",
                value: self.m as f64,
                reason: "zf requires m > k",
            });
        }
        if self.trials < 100 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: self.trials as f64,
                reason: "at least 100 trials are needed for the confidence interval",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    /// Mean over trials of the sum over users of `log2(1 + SINR)`.
    pub empirical_rate: f64,
    /// 95% half-width, normal approximation.
    pub ci_halfwidth: f64,
    pub bound_rate: f64,
    /// `empirical_rate - bound_rate`
    pub margin: f64,
    /// Trials redrawn because the Gram matrix was numerically singular.
    pub resampled: u64,
}

/// Deterministic CN(0, 1) channel source.
pub struct ChannelSampler {
    rng: ChaCha8Rng,
}

impl ChannelSampler {
    pub fn new(seed: u64, trial: u64, attempt: u64) -> Self {
        let key = seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(trial);
        Self { rng }
    }

    /// Circularly-symmetric, variance 1/2 per real component.
    pub fn next_gaussian(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }

    /// `m x k` matrix whose column `j` is user `j`'s channel.
    pub fn channel(&mut self, m: usize, k: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(m, k, |_, _| self.next_gaussian())
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Sum over users of `log2(1 + SINR)` for one channel draw, or `None` when
/// the ZF Gram matrix is numerically singular.
fn trial_rate(h: &DMatrix<Complex64>, gamma: f64, det: Detector) -> Option<f64> {
    let gram = h.ad_mul(h);
    let k = gram.nrows();
    match det {
        Detector::Mrc => {
            let mut total = 0.0;
            for u in 0..k {
                let own = gram[(u, u)].re;
                let interference: f64 = (0..k)
                    .filter(|&j| j != u)
                    .map(|j| gram[(u, j)].norm_sqr())
                    .sum();
                let sinr = gamma * own * own / (gamma * interference + own);
                total += log2_1p(sinr);
            }
            Some(total)
        }
        Detector::Zf => {
            let inv = gram.cholesky()?.inverse();
            let mut total = 0.0;
            for u in 0..k {
                let d = inv[(u, u)].re;
                if !(d.is_finite() && d > 0.0) {
                    return None;
                }
                total += log2_1p(gamma / d);
            }
            Some(total)
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    resampled: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
            resampled: self.resampled + other.resampled,
        }
    }
}

fn run_chunk(cfg: &McConfig, start: u64, end: u64) -> Result<Moments> {
    let mut acc = Moments::default();
    for trial in start..end {
        let mut attempt = 0;
        let rate = loop {
            let h = ChannelSampler::new(cfg.seed, trial, attempt).channel(cfg.m, cfg.k);
            if let Some(r) = trial_rate(&h, cfg.gamma, cfg.detector) {
                break r;
            }
            attempt += 1;
            if attempt > MAX_RESAMPLES {
                return Err(Error::OutOfRange(format!(
                    "trial {trial}: channel Gram matrix singular after {MAX_RESAMPLES} redraws"
                )));
            }
        };
        acc.resampled += attempt;
        acc.push(rate);
    }
    Ok(acc)
}

pub fn simulate(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| run_chunk(cfg, c * CHUNK, ((c + 1) * CHUNK).min(cfg.trials)))
        .collect::<Result<_>>()?;
    let stats = parts.into_iter().fold(Moments::default(), Moments::merge);

    let variance = stats.m2 / (stats.n - 1.0);
    let ci_halfwidth = Z_95 * (variance / stats.n).sqrt();
    let ant = AntennaConfig::integer(cfg.m as u64, cfg.k as u64)?;
    let bound_rate = rate_achieved(&ant, cfg.gamma, cfg.detector)?;
    Ok(McResult {
        empirical_rate: stats.mean,
        ci_halfwidth,
        bound_rate,
        margin: stats.mean - bound_rate,
        resampled: stats.resampled,
    })
}

/// One [`McResult`] per configuration, in input order.
pub fn bound_gap_sweep(configs: &[McConfig]) -> Result<Vec<McResult>> {
    if configs.is_empty() {
        return Err(Error::InvalidParameter {
            name: "configs",
            value: 0.0,
            reason: "at least one configuration is required",
        });
    }
    configs.iter().map(simulate).collect()
}
