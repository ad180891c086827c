//! Large-rate behaviour of the MRC system.
//!
//! Holding the per-user rate at a constant `c` (so `K = R / c`) and
//! matching `M` optimally keeps the efficiency bounded away from zero as
//! `R` grows, converging to `c / (rho_d + rho_r (2^c - 1))`. Above the
//! thresholds `R1` and `R2` the relaxed MRC efficiency is also bounded in
//! terms of the relaxed ZF efficiency.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::evaluate;
use crate::error::{check_positive, Error, Result};
use crate::integer::validate_rates;
use crate::link::{pow2_minus_one, AntennaConfig, Detector};
use crate::relaxation::{minimize_relaxed, optimal_m, RelaxOptions};
use crate::units::{BaseParams, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    /// Fixed per-user spectral efficiency `c` (bits/s/Hz).
    pub per_user_rate: f64,
    pub base: BaseParams,
}

impl TrajectorySpec {
    pub fn new(per_user_rate: f64, base: BaseParams) -> Result<Self> {
        check_positive("per_user_rate", per_user_rate)?;
        base.validate()?;
        Ok(Self {
            per_user_rate,
            base,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub rate: f64,
    pub k: f64,
    pub m: f64,
    pub zeta: f64,
}

/// Closed-form efficiency along the constant per-user-rate trajectory.
fn trajectory_zeta_closed_form(spec: &TrajectorySpec, rate: f64) -> f64 {
    let c = spec.per_user_rate;
    let b = &spec.base;
    let excess = pow2_minus_one(c);
    let denom = 2.0 * (b.alpha * b.rho_r / rate * excess / c).sqrt()
        + b.rho_r / rate
        + b.rho_s / rate
        + b.rho_d / c
        + b.rho_r * (1.0 / c - 1.0 / rate) * excess;
    1.0 / denom
}

pub fn trajectory_point(spec: &TrajectorySpec, rate: f64) -> Result<TrajectoryPoint> {
    check_positive("per_user_rate", spec.per_user_rate)?;
    check_positive("rate", rate)?;
    if rate <= spec.per_user_rate {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "trajectory needs R > c so that K = R/c exceeds 1",
        });
    }
    let theta = spec.base.with_rate(rate)?;
    let k = rate / spec.per_user_rate;
    let m = optimal_m(&theta, k, Detector::Mrc)?;
    let closed = trajectory_zeta_closed_form(spec, rate);
    let direct = evaluate(&AntennaConfig::real(m, k)?, &theta, Detector::Mrc)?.zeta;
    if ((closed - direct) / direct).abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "trajectory efficiency {closed} disagrees with direct evaluation {direct} at R = {rate}"
        )));
    }
    Ok(TrajectoryPoint {
        rate,
        k,
        m,
        zeta: closed,
    })
}

/// Limit of the trajectory efficiency as `R -> infinity`.
pub fn trajectory_limit(spec: &TrajectorySpec) -> Result<f64> {
    check_positive("per_user_rate", spec.per_user_rate)?;
    let c = spec.per_user_rate;
    let denom = spec.base.rho_d + spec.base.rho_r * pow2_minus_one(c);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rho_d + rho_r (2^c - 1)",
            value: denom,
            reason: "must be finite and positive for a finite limit",
        });
    }
    Ok(c / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub r1: f64,
    pub r2: f64,
}

impl Thresholds {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

pub fn thresholds(theta: &SystemParams) -> Result<Thresholds> {
    theta.validate()?;
    if theta.rho_r <= 0.0 {
        return Err(Error::ZeroAntennaPower);
    }
    let (a, rr, rd) = (theta.alpha, theta.rho_r, theta.rho_d);
    let r1 = 4f64.max(4.0 * log2_1p(a / rr));
    let r2 = log2_1p(9.0 * rd * rd / (a * rr)).max(2.0 * (49.0 * rr / a).log2());
    Ok(Thresholds { r1, r2 })
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub thresholds: Thresholds,
    pub zeta_mrc: f64,
    pub zeta_zf: f64,
    /// `1 / min(1/zeta''_zf, rho_d + rho_r/R + rho_s/R)`
    pub bound: f64,
    pub holds: bool,
}

/// Check `zeta''_mrc < 1 / min(1/zeta''_zf, rho_d + (rho_r + rho_s)/R)`.
///
/// Only defined above both rate thresholds.
pub fn mrc_upper_bound_check(theta: &SystemParams, opts: &RelaxOptions) -> Result<BoundCheck> {
    let th = thresholds(theta)?;
    if theta.rate <= th.max() {
        return Err(Error::HypothesesUnmet {
            rate: theta.rate,
            threshold: th.max(),
        });
    }
    let mrc = minimize_relaxed(theta, Detector::Mrc, opts)?;
    let zf = minimize_relaxed(theta, Detector::Zf, opts)?;
    let circuit = theta.rho_d + theta.rho_r / theta.rate + theta.rho_s / theta.rate;
    let bound = 1.0 / (1.0 / zf.zeta).min(circuit);
    Ok(BoundCheck {
        thresholds: th,
        zeta_mrc: mrc.zeta,
        zeta_zf: zf.zeta,
        bound,
        holds: mrc.zeta < bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorComparison {
    pub rate: f64,
    pub zeta_mrc: f64,
    pub zeta_zf: f64,
    pub mrc_less: bool,
}

/// Relaxed MRC and ZF efficiencies side by side along a rate sweep.
pub fn zf_vs_mrc_compare(base: &BaseParams, rates: &[f64], opts: &RelaxOptions) -> Result<Vec<DetectorComparison>> {
    validate_rates(rates)?;
    rates
        .par_iter()
        .map(|&rate| {
            let theta = base.with_rate(rate)?;
            let mrc = minimize_relaxed(&theta, Detector::Mrc, opts)?;
            let zf = minimize_relaxed(&theta, Detector::Zf, opts)?;
            Ok(DetectorComparison {
                rate,
                zeta_mrc: mrc.zeta,
                zeta_zf: zf.zeta,
                mrc_less: mrc.zeta < zf.zeta,
            })
        })
        .collect()
}
