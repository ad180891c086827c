//! Required transmit SNR and feasibility for MRC and ZF reception.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Mrc,
    Zf,
}

impl Detector {
    pub const ALL: [Detector; 2] = [Detector::Mrc, Detector::Zf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Detector::Mrc => "mrc",
            Detector::Zf => "zf",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mrc" => Ok(Detector::Mrc),
            "zf" => Ok(Detector::Zf),
            _ => Err(Error::InvalidParameter {
                name: "detector",
                value: f64::NAN,
                reason: "expected `mrc` or `zf`",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigMode {
    Integer,
    Real,
}

/// A candidate `(M, K)` pair.
///
/// Integer configs come from the exact optimizer; real configs only from
/// the continuous relaxations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaConfig {
    m: f64,
    k: f64,
    mode: ConfigMode,
}

impl AntennaConfig {
    pub fn integer(m: u64, k: u64) -> Result<Self> {
        if m < 1 || k < 1 {
            return Err(Error::InvalidParameter {
                name: if m < 1 { "M" } else { "K" },
                value: m.min(k) as f64,
                reason: "antenna and user counts must be at least 1",
            });
        }
        Ok(Self {
            m: m as f64,
            k: k as f64,
            mode: ConfigMode::Integer,
        })
    }

    pub fn real(m: f64, k: f64) -> Result<Self> {
        for (name, v) in [("M", m), ("K", k)] {
            if !v.is_finite() || v < 1.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and at least 1",
                });
            }
        }
        Ok(Self {
            m,
            k,
            mode: ConfigMode::Real,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mode(&self) -> ConfigMode {
        self.mode
    }
}

/// `2^x - 1`, accurate for small `x` and saturating to `+inf` on overflow.
pub fn pow2_minus_one(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// `(K - 1) * (2^{R/K} - 1)` with the `K = 1` term pinned to zero even when
/// the exponential has saturated.
pub(crate) fn interference_load(k: f64, excess: f64) -> f64 {
    if k == 1.0 {
        0.0
    } else {
        (k - 1.0) * excess
    }
}

/// Exact integer feasibility test for MRC when `R/K` is a whole number.
/// `None` when the exponent is not integral.
fn mrc_feasible_exact(m: u64, k: u64, rate: f64) -> Option<bool> {
    if rate.fract() != 0.0 || rate > u64::MAX as f64 {
        return None;
    }
    let r = rate as u64;
    if !r.is_multiple_of(k) {
        return None;
    }
    let q = r / k;
    if k == 1 {
        return Some(m > 1);
    }
    let load = if q >= 127 {
        None
    } else {
        ((1u128 << q) - 1).checked_mul(u128::from(k - 1))
    };
    Some(match load {
        Some(load) => u128::from(m - 1) > load,
        None => false,
    })
}

pub fn is_feasible(cfg: &AntennaConfig, rate: f64, det: Detector) -> bool {
    if !(rate.is_finite() && rate > 0.0) {
        return false;
    }
    match det {
        Detector::Zf => cfg.m > cfg.k,
        Detector::Mrc => {
            if cfg.mode == ConfigMode::Integer {
                if let Some(ans) = mrc_feasible_exact(cfg.m as u64, cfg.k as u64, rate) {
                    return ans;
                }
            }
            let excess = pow2_minus_one(rate / cfg.k);
            cfg.m - 1.0 > interference_load(cfg.k, excess)
        }
    }
}

/// Normalized transmit SNR needed to reach sum rate `rate` at `cfg`.
pub fn gamma_required(cfg: &AntennaConfig, rate: f64, det: Detector) -> Result<f64> {
    check_positive("rate", rate)?;
    let infeasible = || {
        Error::Infeasible(format!(
            "{det} with M = {}, K = {} at R = {rate}",
            cfg.m, cfg.k
        ))
    };
    if !is_feasible(cfg, rate, det) {
        return Err(infeasible());
    }
    let excess = pow2_minus_one(rate / cfg.k);
    let gain = match det {
        Detector::Mrc => (cfg.m - 1.0) - interference_load(cfg.k, excess),
        Detector::Zf => cfg.m - cfg.k,
    };
    let gamma = excess / gain;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(infeasible());
    }
    Ok(gamma)
}

/// Achievable sum rate (bits/s/Hz) at transmit SNR `gamma`.
pub fn rate_achieved(cfg: &AntennaConfig, gamma: f64, det: Detector) -> Result<f64> {
    check_positive("gamma", gamma)?;
    let (m, k) = (cfg.m, cfg.k);
    let sinr = match det {
        Detector::Mrc => gamma * (m - 1.0) / (gamma * (k - 1.0) + 1.0),
        Detector::Zf => {
            if m <= k {
                return Err(Error::Infeasible(format!(
                    "zf requires M > K, got M = {m}, K = {k}"
                )));
            }
            gamma * (m - k)
        }
    };
    Ok(k * sinr.ln_1p() / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn int(m: u64, k: u64) -> AntennaConfig {
        AntennaConfig::integer(m, k).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert!(is_feasible(&int(2, 1), 4.0, Detector::Mrc));
        assert!(!is_feasible(&int(4, 2), 4.0, Detector::Mrc));
        assert!(is_feasible(&int(5, 2), 4.0, Detector::Mrc));
        assert!(is_feasible(&int(3, 2), 4.0, Detector::Zf));
        assert!(!is_feasible(&int(2, 2), 4.0, Detector::Zf));
        assert!(!is_feasible(&int(1, 1), 4.0, Detector::Mrc));
    }

    #[test]
    fn boundary_is_excluded_in_real_mode_too() {
        let cfg = AntennaConfig::real(4.0, 2.0).unwrap();
        assert!(!is_feasible(&cfg, 4.0, Detector::Mrc));
        let cfg = AntennaConfig::real(4.000001, 2.0).unwrap();
        assert!(is_feasible(&cfg, 4.0, Detector::Mrc));
    }

    #[test]
    fn exact_integer_path_handles_huge_exponents() {
        // (K-1)(2^200 - 1) overflows u128, so nothing is feasible.
        assert!(!is_feasible(&int(u64::MAX, 2), 400.0, Detector::Mrc));
        assert_eq!(mrc_feasible_exact(10, 3, 5.0), None);
        assert_eq!(mrc_feasible_exact(8, 2, 4.0), Some(true));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_required(&int(2, 1), 1.0, Detector::Mrc).unwrap(), 1.0);
        assert_eq!(gamma_required(&int(2, 1), 1.0, Detector::Zf).unwrap(), 1.0);
        assert_relative_eq!(
            gamma_required(&int(8, 2), 4.0, Detector::Mrc).unwrap(),
            0.75,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            gamma_required(&int(8, 2), 4.0, Detector::Zf).unwrap(),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn gamma_rejects_infeasible() {
        assert!(matches!(
            gamma_required(&int(4, 2), 4.0, Detector::Mrc),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            gamma_required(&int(2, 2), 4.0, Detector::Zf),
            Err(Error::Infeasible(_))
        ));
        // 2^{R/K} saturates; K = 1 must not produce NaN
        assert!(gamma_required(&int(1000, 1), 5000.0, Detector::Mrc).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_relative_eq!(
            rate_achieved(&int(2, 1), 1.0, Detector::Mrc).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        let expected = 10.0 * (1.0f64 + 10.0 / 1.9).log2();
        let got = rate_achieved(&int(101, 10), 0.1, Detector::Mrc).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-14);
        assert!((got - 26.47).abs() < 0.01);
        assert!(rate_achieved(&int(2, 2), 1.0, Detector::Zf).is_err());
    }

    #[test]
    fn construction_guards() {
        assert!(AntennaConfig::integer(0, 1).is_err());
        assert!(AntennaConfig::integer(1, 0).is_err());
        assert!(AntennaConfig::real(0.5, 1.0).is_err());
        assert!(AntennaConfig::real(2.0, f64::NAN).is_err());
        assert_eq!(int(3, 2).mode(), ConfigMode::Integer);
    }

    #[test]
    fn pow2_saturates() {
        assert_eq!(pow2_minus_one(2000.0), f64::INFINITY);
        assert_relative_eq!(pow2_minus_one(1e-12), 1e-12 * LN_2, max_relative = 1e-10);
        assert_eq!(pow2_minus_one(2.0), 3.0);
    }

    proptest! {
        #[test]
        fn rate_inverts_gamma(rate in 0.1f64..60.0, k in 1u64..40, extra in 1u64..400, zf in any::<bool>()) {
            let det = if zf { Detector::Zf } else { Detector::Mrc };
            let kf = k as f64;
            let base = match det {
                Detector::Zf => kf,
                Detector::Mrc => 1.0 + interference_load(kf, pow2_minus_one(rate / kf)),
            };
            prop_assume!(base < 1e12);
            let m = base.floor() as u64 + extra;
            let cfg = int(m, k);
            prop_assume!(is_feasible(&cfg, rate, det));
            let gamma = gamma_required(&cfg, rate, det).unwrap();
            let back = rate_achieved(&cfg, gamma, det).unwrap();
            prop_assert!(((back - rate) / rate).abs() < 1e-12, "{back} vs {rate}");
        }

        #[test]
        fn gamma_decreases_in_m(rate in 0.5f64..30.0, k in 1u64..20, m0 in 2u64..200) {
            for det in Detector::ALL {
                let a = int(m0 + k * 64, k);
                let b = int(m0 + k * 64 + 1, k);
                if let (Ok(ga), Ok(gb)) = (gamma_required(&a, rate, det), gamma_required(&b, rate, det)) {
                    prop_assert!(gb < ga);
                }
            }
        }

        #[test]
        fn mrc_needs_more_snr_than_zf(k in 1u64..30, per_user in 1.0f64..6.0, extra in 1u64..500) {
            let rate = per_user * k as f64;
            let load = interference_load(k as f64, pow2_minus_one(per_user));
            let m = (1.0 + load).floor() as u64 + extra;
            let cfg = int(m.max(k + 1), k);
            let (g_mrc, g_zf) = (gamma_required(&cfg, rate, Detector::Mrc), gamma_required(&cfg, rate, Detector::Zf));
            if let (Ok(g_mrc), Ok(g_zf)) = (g_mrc, g_zf) {
                prop_assert!(g_mrc >= g_zf);
                if k == 1 {
                    prop_assert_eq!(g_mrc, g_zf);
                }
            }
        }

        #[test]
        fn mrc_gamma_grows_as_margin_shrinks(rate in 1.0f64..20.0, k in 1.0f64..10.0, t1 in 1e-3f64..50.0, dt in 1e-3f64..50.0) {
            let load = interference_load(k, pow2_minus_one(rate / k));
            let narrow = AntennaConfig::real(1.0 + load + t1, k).unwrap();
            let wide = AntennaConfig::real(1.0 + load + t1 + dt, k).unwrap();
            let g_narrow = gamma_required(&narrow, rate, Detector::Mrc).unwrap();
            let g_wide = gamma_required(&wide, rate, Detector::Mrc).unwrap();
            prop_assert!(g_narrow > g_wide);
        }
    }
}
