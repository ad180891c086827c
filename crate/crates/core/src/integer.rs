//! Exact optimization over integer `(M, K)`.
//!
//! For fixed `K` the objective is strictly convex in `M` on the feasible
//! set, so only the two integers around the continuous optimum need to be
//! checked. `K` is enumerated upward from 1 and the scan stops once the
//! monotone lower bound `K * rho_d + rho_s + M_min(K) * rho_r` reaches the
//! incumbent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::{evaluate, EfficiencyReport};
use crate::error::{Error, Result};
use crate::link::{AntennaConfig, Detector};
use crate::relaxation::{minimize_relaxed, optimal_m, relaxed_objective, RelaxOptions, RelaxedOptimum};
use crate::units::{BaseParams, SystemParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegerOptions {
    /// Hard upper bound on `K`. Required when `rho_d = 0`.
    pub k_max: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub m_star: u64,
    pub k_star: u64,
    pub zeta_star: f64,
    /// Total normalized power at the optimum.
    pub objective: f64,
    pub detector: Detector,
    pub report: EfficiencyReport,
    /// Inclusive range of `K` values examined.
    pub k_range_searched: (u64, u64),
    /// First `K` at which the lower bound closed the search, if any.
    pub pruned_at: Option<u64>,
}

/// Smallest antenna count any feasible config can have at `k` users.
fn min_antennas(k: u64, det: Detector) -> u64 {
    match det {
        Detector::Mrc => 2,
        Detector::Zf => k + 1,
    }
}

fn tail_bound(k: u64, theta: &SystemParams, det: Detector) -> f64 {
    k as f64 * theta.rho_d + theta.rho_s + min_antennas(k, det) as f64 * theta.rho_r
}

// f64 integers are exact below 2^53
const M_LIMIT: f64 = 9.0e15;

pub fn optimize_exact(theta: &SystemParams, det: Detector, opts: &IntegerOptions) -> Result<Optimum> {
    theta.validate()?;
    if theta.rho_r <= 0.0 {
        return Err(Error::ZeroAntennaPower);
    }
    if theta.rho_d <= 0.0 && opts.k_max.is_none() {
        return Err(Error::UnboundedSearch);
    }
    let k_limit = opts.k_max.unwrap_or(u64::MAX);
    if k_limit < 1 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            value: 0.0,
            reason: "must be at least 1",
        });
    }

    let mut best: Option<(u64, u64, EfficiencyReport)> = None;
    let mut incumbent = f64::INFINITY;
    let mut pruned_at = None;
    let mut last_k = 0;
    let mut skipped: Option<(u64, f64)> = None;
    let mut k = 1u64;
    while k <= k_limit {
        if tail_bound(k, theta, det) >= incumbent {
            pruned_at = Some(k);
            break;
        }
        last_k = k;
        let m_cont = optimal_m(theta, k as f64, det)?;
        if m_cont.is_finite() && m_cont < M_LIMIT {
            let lo = (m_cont.floor() as u64).max(min_antennas(k, det));
            let hi = (m_cont.ceil() as u64).max(lo);
            for m in lo..=hi {
                let Ok(report) = evaluate(&AntennaConfig::integer(m, k)?, theta, det) else {
                    continue;
                };
                if report.total_power() < incumbent {
                    incumbent = report.total_power();
                    best = Some((m, k, report));
                }
            }
        } else if m_cont.is_finite() {
            // the relaxed power bounds every integer M at this K from below
            let floor = relaxed_objective(k as f64, theta, det)?;
            skipped = Some(skipped.map_or((k, floor), |(k0, f0): (u64, f64)| {
                if floor < f0 { (k, floor) } else { (k0, f0) }
            }));
        }
        if k == u64::MAX {
            break;
        }
        k += 1;
    }

    if let Some((k, floor)) = skipped {
        if floor < incumbent {
            return Err(Error::OutOfRange(format!(
                "optimal antenna count at K = {k} exceeds the exact integer range"
            )));
        }
    }
    let (m_star, k_star, report) = best.ok_or(Error::NoFeasiblePoint)?;
    Ok(Optimum {
        m_star,
        k_star,
        zeta_star: report.zeta,
        objective: report.total_power(),
        detector: det,
        report,
        k_range_searched: (1, last_k),
        pruned_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub rate: f64,
    pub exact: Optimum,
    pub relaxed: RelaxedOptimum,
    /// `zeta* / zeta''`, at most 1.
    pub ratio: f64,
}

pub(crate) fn validate_rates(rates: &[f64]) -> Result<()> {
    if rates.is_empty() {
        return Err(Error::InvalidParameter {
            name: "rates",
            value: 0.0,
            reason: "sweep must contain at least one rate",
        });
    }
    for w in rates.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "rates",
                value: w[1],
                reason: "rates must be strictly increasing",
            });
        }
    }
    Ok(())
}

/// Exact and relaxed optima along a sweep of sum rates, in input order.
pub fn optimal_pair_trace(
    base: &BaseParams,
    rates: &[f64],
    det: Detector,
    int_opts: &IntegerOptions,
    relax_opts: &RelaxOptions,
) -> Result<Vec<TracePoint>> {
    validate_rates(rates)?;
    rates
        .par_iter()
        .map(|&rate| {
            let theta = base.with_rate(rate)?;
            let exact = optimize_exact(&theta, det, int_opts)?;
            let relaxed = minimize_relaxed(&theta, det, relax_opts)?;
            Ok(TracePoint {
                rate,
                exact,
                relaxed,
                ratio: exact.zeta_star / relaxed.zeta,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(r: f64, a: f64, rr: f64, rd: f64, rs: f64) -> SystemParams {
        SystemParams::new(r, a, rr, rd, rs).unwrap()
    }

    /// Unpruned scan of every `(M, K)` in the box, smaller `K` then smaller
    /// `M` on ties. The objective is written out directly.
    fn brute_force(th: &SystemParams, det: Detector, m_max: u64, k_max: u64) -> (u64, u64, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for k in 1..=k_max {
            let kf = k as f64;
            let e = 2f64.powf(th.rate / kf) - 1.0;
            for m in 1..=m_max {
                let mf = m as f64;
                let gain = match det {
                    Detector::Mrc => (mf - 1.0) - (kf - 1.0) * e,
                    Detector::Zf => mf - kf,
                };
                if !(gain > 0.0) {
                    continue;
                }
                let p = th.alpha * kf * e / gain + mf * th.rho_r + kf * th.rho_d + th.rho_s;
                if p < best.2 {
                    best = (m, k, p);
                }
            }
        }
        best
    }

    #[test]
    fn small_instance_matches_brute_force() {
        let th = theta(1.0, 2.0, 0.1, 0.1, 0.0);
        for det in Detector::ALL {
            let opt = optimize_exact(&th, det, &IntegerOptions::default()).unwrap();
            let (m, k, p) = brute_force(&th, det, 10_000, 1000);
            assert_eq!((opt.m_star, opt.k_star), (m, k), "{det}");
            assert!(((opt.objective - p) / p).abs() < 1e-12);
            let rep = evaluate(&AntennaConfig::integer(m, k).unwrap(), &th, det).unwrap();
            assert_eq!(opt.zeta_star, rep.zeta);
            assert!(opt.pruned_at.is_some());
        }
    }

    #[test]
    fn single_user_regime() {
        // user circuits so expensive that K = 1 wins
        let th = theta(2.0, 2.0, 1.0, 1e6, 1.0);
        let mrc = optimize_exact(&th, Detector::Mrc, &IntegerOptions::default()).unwrap();
        let zf = optimize_exact(&th, Detector::Zf, &IntegerOptions::default()).unwrap();
        assert_eq!(mrc.k_star, 1);
        assert_eq!(zf.k_star, 1);
        let m_cont = 1.0 + (2.0 * 3.0f64 / 1.0).sqrt();
        assert!(mrc.m_star == m_cont.floor() as u64 || mrc.m_star == m_cont.ceil() as u64);
        assert_eq!(mrc.zeta_star, zf.zeta_star);
        assert_eq!(mrc.m_star, zf.m_star);
    }

    #[test]
    fn optimum_grows_with_rate() {
        let base = BaseParams::new(2.0, 1e3, 1e3, 1e3).unwrap();
        let trace = optimal_pair_trace(
            &base,
            &[100.0, 300.0, 1000.0],
            Detector::Mrc,
            &IntegerOptions::default(),
            &RelaxOptions::default(),
        )
        .unwrap();
        for w in trace.windows(2) {
            assert!(w[1].exact.m_star >= w[0].exact.m_star);
            assert!(w[1].exact.k_star >= w[0].exact.k_star);
        }
        for p in &trace {
            assert!(p.ratio <= 1.0);
        }
        assert!(trace[2].ratio > trace[0].ratio.min(0.999));
    }

    #[test]
    fn single_element_trace_is_optimize_exact() {
        let base = BaseParams::new(2.0, 3.0, 4.0, 5.0).unwrap();
        let t = optimal_pair_trace(&base, &[25.0], Detector::Zf, &IntegerOptions::default(), &RelaxOptions::default()).unwrap();
        let direct = optimize_exact(&base.with_rate(25.0).unwrap(), Detector::Zf, &IntegerOptions::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].exact, direct);
    }

    #[test]
    fn trace_rejects_bad_sweeps() {
        let base = BaseParams::new(2.0, 3.0, 4.0, 5.0).unwrap();
        let o = (IntegerOptions::default(), RelaxOptions::default());
        assert!(optimal_pair_trace(&base, &[], Detector::Mrc, &o.0, &o.1).is_err());
        assert!(optimal_pair_trace(&base, &[5.0, 5.0], Detector::Mrc, &o.0, &o.1).is_err());
        assert!(optimal_pair_trace(&base, &[-1.0, 5.0], Detector::Mrc, &o.0, &o.1).is_err());
    }

    #[test]
    fn guards() {
        let th = theta(10.0, 2.0, 1.0, 0.0, 1.0);
        assert_eq!(
            optimize_exact(&th, Detector::Mrc, &IntegerOptions::default()),
            Err(Error::UnboundedSearch)
        );
        let opt = optimize_exact(&th, Detector::Mrc, &IntegerOptions { k_max: Some(50) }).unwrap();
        assert!(opt.k_star <= 50);
        assert_eq!(opt.k_range_searched, (1, 50));
        assert_eq!(opt.pruned_at, None);
        let th0 = theta(10.0, 2.0, 0.0, 1.0, 1.0);
        assert_eq!(
            optimize_exact(&th0, Detector::Zf, &IntegerOptions::default()),
            Err(Error::ZeroAntennaPower)
        );
        // R = 4000 with K capped at 2 leaves 2^{2000} overflowing: nothing feasible
        let huge = theta(4000.0, 2.0, 1.0, 1.0, 1.0);
        assert_eq!(
            optimize_exact(&huge, Detector::Mrc, &IntegerOptions { k_max: Some(2) }),
            Err(Error::NoFeasiblePoint)
        );
    }

    #[test]
    fn rho_s_does_not_move_argmin() {
        for det in Detector::ALL {
            let a = optimize_exact(&theta(40.0, 2.0, 3.0, 2.0, 0.0), det, &IntegerOptions::default()).unwrap();
            let b = optimize_exact(&theta(40.0, 2.0, 3.0, 2.0, 250.0), det, &IntegerOptions::default()).unwrap();
            assert_eq!((a.m_star, a.k_star), (b.m_star, b.k_star));
            assert!(b.zeta_star < a.zeta_star);
        }
    }

    #[test]
    fn relaxation_dominates_exact() {
        for rate in [3.0, 17.0, 90.0] {
            let th = theta(rate, 2.5, 0.5, 2.0, 1.0);
            for det in Detector::ALL {
                let e = optimize_exact(&th, det, &IntegerOptions::default()).unwrap();
                let r = minimize_relaxed(&th, det, &RelaxOptions::default()).unwrap();
                assert!(e.zeta_star <= r.zeta * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn convexity_in_m_is_safe() {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut unif = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        while checked < 1000 {
            let rate = 0.5 + 20.0 * unif();
            let k = 1 + (unif() * 12.0) as u64;
            let rho_r = 10f64.powf(-2.0 + 3.0 * unif());
            let th = theta(rate, 1.5 + 3.0 * unif(), rho_r, 1.0, 1.0);
            let det = if unif() < 0.5 { Detector::Mrc } else { Detector::Zf };
            let m_cont = optimal_m(&th, k as f64, det).unwrap();
            if m_cont > 5e4 {
                continue;
            }
            let mut best = (0u64, f64::INFINITY);
            for m in 1..=(4.0 * m_cont).ceil() as u64 {
                if let Ok(r) = evaluate(&AntennaConfig::integer(m, k).unwrap(), &th, det) {
                    if r.total_power() < best.1 {
                        best = (m, r.total_power());
                    }
                }
            }
            assert!(
                best.0 == m_cont.floor() as u64 || best.0 == m_cont.ceil() as u64,
                "m_cont = {m_cont}, best = {}",
                best.0
            );
            checked += 1;
        }
    }
}
