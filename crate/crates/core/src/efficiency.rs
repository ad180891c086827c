//! Energy-efficiency objective and its additive power budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{gamma_required, AntennaConfig, Detector};
use crate::units::SystemParams;

/// Normalized efficiency together with the power terms it was built from.
///
/// All powers are in units of `N0 * B / Gc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub zeta: f64,
    pub gamma: f64,
    /// `alpha * K * gamma`: power drawn by the user PAs.
    pub power_pa: f64,
    /// `M * rho_r`
    pub power_bs_antennas: f64,
    /// `K * rho_d`
    pub power_user_circuits: f64,
    /// `rho_s`
    pub power_residual: f64,
    pub pa_fraction: f64,
}

impl EfficiencyReport {
    pub fn total_power(&self) -> f64 {
        self.power_pa + self.power_bs_antennas + self.power_user_circuits + self.power_residual
    }
}

pub fn evaluate(cfg: &AntennaConfig, theta: &SystemParams, det: Detector) -> Result<EfficiencyReport> {
    theta.validate()?;
    let gamma = gamma_required(cfg, theta.rate, det)?;
    let power_pa = theta.alpha * cfg.k() * gamma;
    let power_bs_antennas = cfg.m() * theta.rho_r;
    let power_user_circuits = cfg.k() * theta.rho_d;
    let power_residual = theta.rho_s;
    let total = power_pa + power_bs_antennas + power_user_circuits + power_residual;
    let zeta = theta.rate / total;
    if !zeta.is_normal() {
        return Err(Error::OutOfRange(format!(
            "zeta = {zeta} at M = {}, K = {} ({det})",
            cfg.m(),
            cfg.k()
        )));
    }
    Ok(EfficiencyReport {
        zeta,
        gamma,
        power_pa,
        power_bs_antennas,
        power_user_circuits,
        power_residual,
        pa_fraction: power_pa / total,
    })
}

/// Share of the total consumed power spent in the user power amplifiers.
pub fn pa_power_fraction(cfg: &AntennaConfig, theta: &SystemParams, det: Detector) -> Result<f64> {
    evaluate(cfg, theta, det).map(|r| r.pa_fraction)
}
