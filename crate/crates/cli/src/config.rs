//! JSON run configuration.
//!
//! A config names the system either in physical units (`physical`) or
//! directly in normalized form (`normalized`), never both. Sections for
//! the individual subcommands are optional and checked on use.

use std::collections::BTreeSet;
use std::path::Path;

use mimo_ee::{normalize, BaseParams, Detector, McConfig, PhysicalParams};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub physical: Option<PhysicalSection>,
    pub normalized: Option<BaseParams>,
    /// Sum spectral efficiency for single-point subcommands.
    pub rate: Option<f64>,
    pub detectors: Option<Vec<Detector>>,
    pub k_max: Option<u64>,
    /// Evaluate `breakdown` at this `(M, K)` instead of at the optimum.
    pub point: Option<PointSection>,
    pub sweep: Option<SweepSection>,
    pub trajectory: Option<TrajectorySection>,
    pub montecarlo: Option<MonteCarloSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub bandwidth_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub path_gain: Option<f64>,
    pub path_gain_db: Option<f64>,
    pub pa_slope: f64,
    pub p_r_w: f64,
    pub p_t_w: f64,
    pub p_dec_w: f64,
    pub p_s_w: f64,
}

impl PhysicalSection {
    pub fn to_params(&self) -> Result<PhysicalParams, CliError> {
        let path_gain = match (self.path_gain, self.path_gain_db) {
            (Some(g), None) => g,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            _ => {
                return Err(CliError::Config(
                    "physical: exactly one of path_gain, path_gain_db is required".into(),
                ))
            }
        };
        let p = PhysicalParams {
            bandwidth: self.bandwidth_hz,
            noise_psd: self.noise_psd_w_per_hz,
            path_gain,
            pa_slope: self.pa_slope,
            p_r: self.p_r_w,
            p_t: self.p_t_w,
            p_dec: self.p_dec_w,
            p_s: self.p_s_w,
        };
        p.validate().map_err(CliError::from_param)?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSection {
    pub m: u64,
    pub k: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RateList {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl RateList {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let rates = match self {
            RateList::List(v) => v.clone(),
            RateList::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0 && start.is_finite() && stop.is_finite()) {
                    return Err(CliError::Config(
                        "rate range needs finite start/stop and a positive step".into(),
                    ));
                }
                let n = ((stop - start) / step + 1e-9).floor();
                if !(0.0..=1e7).contains(&n) {
                    return Err(CliError::Config("rate range is empty or too long".into()));
                }
                (0..=n as usize).map(|i| start + i as f64 * step).collect()
            }
        };
        if rates.is_empty() {
            return Err(CliError::Config("rate list is empty".into()));
        }
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(CliError::Config("rates must be finite and positive".into()));
        }
        if rates.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config("rates must be strictly increasing".into()));
        }
        Ok(rates)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Exact,
    Relaxed,
    Trajectory,
    PaFraction,
    Comparison,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub rates: RateList,
    pub detectors: Option<Vec<Detector>>,
    pub outputs: Vec<Output>,
    /// Per-user rate `c` for the `trajectory` output.
    pub per_user_rate: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub per_user_rate: f64,
    pub rates: RateList,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub points: Vec<McPoint>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McPoint {
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
    /// Both detectors when absent.
    pub detector: Option<Detector>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Validated description of an R-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub rates: Vec<f64>,
    pub base: BaseParams,
    pub detectors: Vec<Detector>,
    pub outputs: BTreeSet<Output>,
    pub per_user_rate: Option<f64>,
    pub k_max: Option<u64>,
    /// Physical parameters when the config was given in physical units.
    pub physical: Option<PhysicalParams>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.detectors.is_empty() {
            return Err(CliError::Config("detector set is empty".into()));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Config("at least one output must be selected".into()));
        }
        RateList::List(self.rates.clone()).values()?;
        self.base.validate().map_err(CliError::from_param)?;
        if self.outputs.contains(&Output::Trajectory) {
            match self.per_user_rate {
                Some(c) if c.is_finite() && c > 0.0 => {}
                _ => {
                    return Err(CliError::Config(
                        "trajectory output needs a positive sweep.per_user_rate".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn has(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn physical_params(&self) -> Result<Option<PhysicalParams>, CliError> {
        self.physical.as_ref().map(|p| p.to_params()).transpose()
    }

    /// Normalized base parameters from whichever system section is present.
    pub fn base_params(&self) -> Result<BaseParams, CliError> {
        match (&self.physical, &self.normalized) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "`physical` and `normalized` are mutually exclusive".into(),
            )),
            (None, None) => Err(CliError::Config(
                "one of `physical` or `normalized` is required".into(),
            )),
            (None, Some(base)) => {
                base.validate().map_err(CliError::from_param)?;
                Ok(*base)
            }
            (Some(_), None) => {
                let p = self.physical_params()?.expect("physical present");
                Ok(normalize(&p, 1.0).map_err(CliError::from_param)?.base())
            }
        }
    }

    fn detector_set(list: Option<&Vec<Detector>>) -> Vec<Detector> {
        match list {
            None => Detector::ALL.to_vec(),
            Some(v) => {
                let set: BTreeSet<Detector> = v.iter().copied().collect();
                set.into_iter().collect()
            }
        }
    }

    pub fn detectors(&self) -> Vec<Detector> {
        Self::detector_set(self.detectors.as_ref())
    }

    pub fn rate(&self) -> Result<f64, CliError> {
        match self.rate {
            Some(r) if r.is_finite() && r > 0.0 => Ok(r),
            Some(r) => Err(CliError::Config(format!("rate must be positive, got {r}"))),
            None => Err(CliError::Config("`rate` is required".into())),
        }
    }

    /// Rates for multi-point reports: `sweep.rates` if present, else `[rate]`.
    pub fn rates(&self) -> Result<Vec<f64>, CliError> {
        match &self.sweep {
            Some(s) => s.rates.values(),
            None => Ok(vec![self.rate()?]),
        }
    }

    pub fn sweep_spec(&self, k_max: Option<u64>) -> Result<SweepSpec, CliError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("`sweep` section is required".into()))?;
        let detectors = match &sweep.detectors {
            Some(d) => Self::detector_set(Some(d)),
            None => self.detectors(),
        };
        let spec = SweepSpec {
            rates: sweep.rates.values()?,
            base: self.base_params()?,
            detectors,
            outputs: sweep.outputs.iter().copied().collect(),
            per_user_rate: sweep.per_user_rate,
            k_max: k_max.or(self.k_max),
            physical: self.physical_params()?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mc_configs(&self, seed_override: Option<u64>) -> Result<Vec<McConfig>, CliError> {
        let mc = self
            .montecarlo
            .as_ref()
            .ok_or_else(|| CliError::Config("`montecarlo` section is required".into()))?;
        if mc.points.is_empty() {
            return Err(CliError::Config("montecarlo.points is empty".into()));
        }
        let mut out = Vec::new();
        for p in &mc.points {
            let dets = match p.detector {
                Some(d) => vec![d],
                None => Detector::ALL.to_vec(),
            };
            for detector in dets {
                out.push(McConfig {
                    m: p.m,
                    k: p.k,
                    gamma: p.gamma,
                    trials: p.trials.or(mc.trials).unwrap_or(DEFAULT_TRIALS),
                    seed: seed_override.or(p.seed).or(mc.seed).unwrap_or(DEFAULT_SEED),
                    detector,
                });
            }
        }
        Ok(out)
    }
}
