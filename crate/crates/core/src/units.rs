//! Physical units to normalized parameters and back.
//!
//! Every power is normalized by the received noise power referred to the
//! transmitter, `N0 * B / Gc`. Inputs are linear units only.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite_nonneg, check_positive, Error, Result};

/// Raw physical description of the uplink and its power consumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Channel bandwidth in Hz.
    pub bandwidth: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_psd: f64,
    /// Common path gain `Gc` (linear).
    pub path_gain: f64,
    /// Power amplifier inefficiency slope, `> 1`.
    pub pa_slope: f64,
    /// Per-BS-antenna hardware power (W).
    pub p_r: f64,
    /// Per-UT circuit power excluding the PA (W).
    pub p_t: f64,
    /// Per-user processing power at the BS (W).
    pub p_dec: f64,
    /// Residual BS power independent of `M` and `K` (W).
    pub p_s: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("bandwidth", self.bandwidth)?;
        check_positive("noise_psd", self.noise_psd)?;
        check_positive("path_gain", self.path_gain)?;
        check_alpha(self.pa_slope)?;
        check_finite_nonneg("p_r", self.p_r)?;
        check_finite_nonneg("p_t", self.p_t)?;
        check_finite_nonneg("p_dec", self.p_dec)?;
        check_finite_nonneg("p_s", self.p_s)?;
        Ok(())
    }

    /// `p_t + p_dec`; the two only ever enter the budget through their sum.
    pub fn p_d(&self) -> f64 {
        self.p_t + self.p_dec
    }

    /// Noise power referred to the transmitter, `N0 * B / Gc` (W).
    pub fn reference_power(&self) -> f64 {
        self.noise_psd * self.bandwidth / self.path_gain
    }

    /// Normalized transmit SNR for a per-user radiated power `p_u` (W).
    pub fn transmit_snr(&self, p_u: f64) -> f64 {
        p_u / self.reference_power()
    }

    /// Total consumed power in Watts for `m` antennas, `k` users each radiating `p_u`.
    pub fn total_power(&self, m: f64, k: f64, p_u: f64) -> f64 {
        k * (self.pa_slope * p_u + self.p_d()) + m * self.p_r + self.p_s
    }
}

/// The rate-independent part of the normalized parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseParams {
    pub alpha: f64,
    pub rho_r: f64,
    pub rho_d: f64,
    pub rho_s: f64,
}

impl BaseParams {
    pub fn new(alpha: f64, rho_r: f64, rho_d: f64, rho_s: f64) -> Result<Self> {
        let base = Self {
            alpha,
            rho_r,
            rho_d,
            rho_s,
        };
        base.validate()?;
        Ok(base)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_finite_nonneg("rho_r", self.rho_r)?;
        check_finite_nonneg("rho_d", self.rho_d)?;
        check_finite_nonneg("rho_s", self.rho_s)?;
        Ok(())
    }

    pub fn with_rate(&self, rate: f64) -> Result<SystemParams> {
        SystemParams::new(rate, self.alpha, self.rho_r, self.rho_d, self.rho_s)
    }
}

/// Normalized system parameters `(R, alpha, rho_r, rho_d, rho_s)`.
///
/// `rate` is the demanded sum spectral efficiency in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub rate: f64,
    pub alpha: f64,
    pub rho_r: f64,
    pub rho_d: f64,
    pub rho_s: f64,
}

impl SystemParams {
    pub fn new(rate: f64, alpha: f64, rho_r: f64, rho_d: f64, rho_s: f64) -> Result<Self> {
        let theta = Self {
            rate,
            alpha,
            rho_r,
            rho_d,
            rho_s,
        };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("rate", self.rate)?;
        self.base().validate()
    }

    pub fn base(&self) -> BaseParams {
        BaseParams {
            alpha: self.alpha,
            rho_r: self.rho_r,
            rho_d: self.rho_d,
            rho_s: self.rho_s,
        }
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        self.base().with_rate(rate)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "PA slope must be finite and greater than 1",
        });
    }
    Ok(())
}

/// Convert physical quantities into normalized parameters at sum rate `rate`.
pub fn normalize(p: &PhysicalParams, rate: f64) -> Result<SystemParams> {
    p.validate()?;
    let reference = p.reference_power();
    let scaled = |name: &'static str, watts: f64| -> Result<f64> {
        let v = watts / reference;
        if !v.is_finite() {
            return Err(Error::OutOfRange(format!(
                "{name} = {watts} W overflows after normalization"
            )));
        }
        Ok(v)
    };
    SystemParams::new(
        rate,
        p.pa_slope,
        scaled("p_r", p.p_r)?,
        scaled("p_d", p.p_d())?,
        scaled("p_s", p.p_s)?,
    )
}

/// Energy efficiency in bits/Joule from the normalized efficiency `zeta`.
pub fn denormalize_efficiency(zeta: f64, p: &PhysicalParams) -> Result<f64> {
    check_finite_nonneg("zeta", zeta)?;
    check_positive("path_gain", p.path_gain)?;
    check_positive("noise_psd", p.noise_psd)?;
    let eta = zeta * p.path_gain / p.noise_psd;
    if !eta.is_finite() {
        return Err(Error::OutOfRange(format!("eta for zeta = {zeta}")));
    }
    Ok(eta)
}
