//! Continuous relaxations of the `(M, K)` problem.
//!
//! For fixed `K` the objective has the form `t * rho_r + a / t + const`
//! in the antenna surplus `t`, whose minimum `2 sqrt(a rho_r)` is attained
//! at `t = sqrt(a / rho_r)`. That leaves a one-dimensional problem in `K`,
//! solved here by a log-spaced grid followed by golden-section refinement
//! inside the winning bracket.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite_nonneg, check_positive, Error, Result};
use crate::link::{interference_load, pow2_minus_one, Detector};
use crate::scalar::golden_section;
use crate::units::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    pub grid_points: usize,
    /// Upper end of the `K` search interval. Derived from the objective's
    /// `K * rho_d` lower bound when absent.
    pub k_max: Option<f64>,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            k_max: None,
            rel_tol: 1e-9,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub grid_points: usize,
    pub k_max: f64,
    pub bracket: [f64; 2],
    pub refinement_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxedOptimum {
    pub k_star: f64,
    pub m_star: f64,
    pub zeta: f64,
    /// Total normalized power at the optimum, `R / zeta`.
    pub objective: f64,
    pub detector: Detector,
    pub diagnostics: SolverDiagnostics,
}

/// The closed forms only need `alpha > 0`; the `alpha > 1` physical
/// bound is enforced by `SystemParams::new`.
fn require_antenna_power(theta: &SystemParams) -> Result<()> {
    check_positive("rate", theta.rate)?;
    check_positive("alpha", theta.alpha)?;
    check_finite_nonneg("rho_r", theta.rho_r)?;
    check_finite_nonneg("rho_d", theta.rho_d)?;
    check_finite_nonneg("rho_s", theta.rho_s)?;
    if theta.rho_r <= 0.0 {
        return Err(Error::ZeroAntennaPower);
    }
    Ok(())
}

fn require_users(k: f64) -> Result<()> {
    if !k.is_finite() || k < 1.0 {
        return Err(Error::InvalidParameter {
            name: "K",
            value: k,
            reason: "relaxed user count must be finite and at least 1",
        });
    }
    Ok(())
}

/// Minimum PA-plus-surplus-antenna power for given `K`; unchecked.
fn inner_min(k: f64, excess: f64, theta: &SystemParams) -> f64 {
    2.0 * (theta.alpha * theta.rho_r * k * excess).sqrt()
}

/// Total relaxed power at `k` with `M` chosen optimally; `+inf` when
/// `2^{R/k}` saturates.
fn relaxed_power(k: f64, theta: &SystemParams, det: Detector) -> f64 {
    let excess = pow2_minus_one(theta.rate / k);
    if !excess.is_finite() {
        return f64::INFINITY;
    }
    let h = inner_min(k, excess, theta);
    match det {
        Detector::Mrc => {
            h + theta.rho_r
                + theta.rho_s
                + k * theta.rho_d
                + interference_load(k, excess) * theta.rho_r
        }
        Detector::Zf => h + k * (theta.rho_r + theta.rho_d) + theta.rho_s,
    }
}

/// Infimum over the antenna surplus of the PA and surplus-antenna power.
pub fn h_mrc(k: f64, theta: &SystemParams) -> Result<f64> {
    require_antenna_power(theta)?;
    require_users(k)?;
    Ok(inner_min(k, pow2_minus_one(theta.rate / k), theta))
}

/// Total normalized power of an MRC system at `k` users with `M` optimized out.
pub fn g_r(k: f64, theta: &SystemParams) -> Result<f64> {
    require_antenna_power(theta)?;
    require_users(k)?;
    Ok(relaxed_power(k, theta, Detector::Mrc))
}

/// ZF counterpart of [`g_r`]: `2 sqrt(alpha rho_r k (2^{R/k}-1)) + k (rho_r + rho_d) + rho_s`.
pub fn g_zf(k: f64, theta: &SystemParams) -> Result<f64> {
    require_antenna_power(theta)?;
    require_users(k)?;
    Ok(relaxed_power(k, theta, Detector::Zf))
}

pub fn relaxed_objective(k: f64, theta: &SystemParams, det: Detector) -> Result<f64> {
    match det {
        Detector::Mrc => g_r(k, theta),
        Detector::Zf => g_zf(k, theta),
    }
}

/// Real-valued antenna count minimizing the objective for `k` users.
pub fn optimal_m(theta: &SystemParams, k: f64, det: Detector) -> Result<f64> {
    require_antenna_power(theta)?;
    require_users(k)?;
    let excess = pow2_minus_one(theta.rate / k);
    let surplus = (theta.alpha * k * excess / theta.rho_r).sqrt();
    Ok(match det {
        Detector::Mrc => 1.0 + interference_load(k, excess) + surplus,
        Detector::Zf => k + surplus,
    })
}

/// Search bound for `K`: no `k` beyond `best / rho_d` can beat `best`
/// because the objective is at least `k * rho_d`.
fn default_k_max(theta: &SystemParams, det: Detector) -> Result<f64> {
    if theta.rho_d <= 0.0 {
        return Err(Error::UnboundedSearch);
    }
    let mut incumbent = relaxed_power(1.0, theta, det);
    let mut k = 2.0;
    while k * theta.rho_d < incumbent {
        incumbent = incumbent.min(relaxed_power(k, theta, det));
        k *= 2.0;
    }
    Ok((incumbent / theta.rho_d).ceil().max(1.0))
}

pub fn minimize_relaxed(theta: &SystemParams, det: Detector, opts: &RelaxOptions) -> Result<RelaxedOptimum> {
    require_antenna_power(theta)?;
    let k_max = match opts.k_max {
        Some(k) => {
            require_users(k)?;
            k
        }
        None => default_k_max(theta, det)?,
    };
    let n = opts.grid_points.max(2);
    let ln_max = k_max.ln();
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                k_max
            } else {
                (ln_max * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&k| relaxed_power(k, theta, det))
        .collect();

    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        if best.is_none_or(|b| *v < values[b]) {
            best = Some(i);
        }
    }
    let best = best.ok_or(Error::NoFeasiblePoint)?;

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n - 1)];
    let refined = golden_section(
        |k| relaxed_power(k, theta, det),
        lo,
        hi,
        opts.rel_tol,
        opts.max_iter,
    );
    let (k_star, objective) = if refined.fx < values[best] {
        (refined.x, refined.fx)
    } else {
        (grid[best], values[best])
    };

    Ok(RelaxedOptimum {
        k_star,
        m_star: optimal_m(theta, k_star, det)?,
        zeta: theta.rate / objective,
        objective,
        detector: det,
        diagnostics: SolverDiagnostics {
            grid_points: n,
            k_max,
            bracket: [lo, hi],
            refinement_iterations: refined.iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::evaluate;
    use crate::link::{is_feasible, AntennaConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn theta(r: f64, a: f64, rr: f64, rd: f64, rs: f64) -> SystemParams {
        SystemParams::new(r, a, rr, rd, rs).unwrap()
    }

    /// Bypasses the `alpha > 1` constructor check for unit-slope examples.
    fn raw(rate: f64, alpha: f64, rho_r: f64) -> SystemParams {
        SystemParams { rate, alpha, rho_r, rho_d: 0.0, rho_s: 0.0 }
    }

    /// Brute-force minimum of `t * rho_r + c / t` over a log grid plus
    /// local polishing, independent of the closed form.
    fn inner_oracle(c: f64, rho_r: f64) -> f64 {
        let f = |t: f64| t * rho_r + c / t;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=200_000 {
            let t = 10f64.powf(-6.0 + 12.0 * i as f64 / 200_000.0);
            let v = f(t);
            if v < best.0 {
                best = (v, t);
            }
        }
        let (mut lo, mut hi) = (best.1 * 0.999, best.1 * 1.001);
        for _ in 0..200 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if f(a) < f(b) {
                hi = b
            } else {
                lo = a
            }
        }
        f(0.5 * (lo + hi))
    }

    #[test]
    fn h_examples() {
        assert_relative_eq!(h_mrc(1.0, &raw(2.0, 1.0, 1.0)).unwrap(), 2.0 * 3f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(h_mrc(1.0, &theta(2.0, 4.0, 1.0, 0.0, 0.0)).unwrap(), 2.0 * 12f64.sqrt(), max_relative = 1e-12);
        let h = h_mrc(2.0, &theta(4.0, 2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(h, 2.0 * 12f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(h, inner_oracle(2.0 * 2.0 * 3.0, 1.0), max_relative = 1e-9);
    }

    #[test]
    fn zero_antenna_power_rejected() {
        let th = theta(4.0, 2.0, 0.0, 1.0, 1.0);
        assert_eq!(h_mrc(1.0, &th), Err(Error::ZeroAntennaPower));
        assert_eq!(g_r(1.0, &th), Err(Error::ZeroAntennaPower));
        assert_eq!(optimal_m(&th, 1.0, Detector::Zf), Err(Error::ZeroAntennaPower));
        assert!(matches!(
            minimize_relaxed(&th, Detector::Mrc, &RelaxOptions::default()),
            Err(Error::ZeroAntennaPower)
        ));
    }

    #[test]
    fn g_special_points() {
        let th = theta(6.0, 2.0, 1.5, 0.7, 3.0);
        let e1 = 2f64.powf(6.0) - 1.0;
        let at_one = 2.0 * (2.0 * 1.5 * e1).sqrt() + 1.5 + 3.0 + 0.7;
        assert_relative_eq!(g_r(1.0, &th).unwrap(), at_one, max_relative = 1e-14);
        let at_r = 2.0 * (2.0 * 1.5 * 6.0f64).sqrt() + 1.5 + 3.0 + 6.0 * 0.7 + 5.0 * 1.5;
        assert_relative_eq!(g_r(6.0, &th).unwrap(), at_r, max_relative = 1e-14);
    }

    #[test]
    fn g_matches_direct_evaluation() {
        let th = theta(4.0, 2.0, 1.0, 1.0, 1.0);
        let g = g_r(2.0, &th).unwrap();
        assert_relative_eq!(g, 2.0 * 12f64.sqrt() + 7.0, max_relative = 1e-14);
        assert!((g - 13.928).abs() < 1e-3);
        let m = optimal_m(&th, 2.0, Detector::Mrc).unwrap();
        let cfg = AntennaConfig::real(m, 2.0).unwrap();
        assert_relative_eq!(evaluate(&cfg, &th, Detector::Mrc).unwrap().total_power(), g, max_relative = 1e-9);
    }

    #[test]
    fn g_saturates_instead_of_nan() {
        let th = theta(5000.0, 2.0, 1.0, 1.0, 1.0);
        assert_eq!(g_r(1.0, &th).unwrap(), f64::INFINITY);
        assert!(g_r(100.0, &th).unwrap().is_finite());
    }

    #[test]
    fn optimal_m_examples() {
        assert_relative_eq!(optimal_m(&raw(1.0, 1.0, 1.0), 1.0, Detector::Mrc).unwrap(), 2.0, max_relative = 1e-12);
        let th = theta(4.0, 2.0, 1.0, 1.0, 1.0);
        let m = optimal_m(&th, 2.0, Detector::Mrc).unwrap();
        assert_relative_eq!(m, 4.0 + 12f64.sqrt(), max_relative = 1e-14);
        // dense grid over M of the exact MRC objective
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..2_000_000 {
            let mm = 4.0 + i as f64 * 1e-5;
            let v = 2.0 * 2.0 * 3.0 / (mm - 1.0 - 3.0) + mm + 2.0 + 1.0;
            if v < best.0 {
                best = (v, mm);
            }
        }
        assert!((best.1 - m).abs() < 2e-5);
    }

    proptest! {
        #[test]
        fn mrc_zf_antenna_gap(k in 1.0f64..50.0, rate in 0.1f64..100.0, rr in 0.01f64..100.0) {
            let th = theta(rate, 2.0, rr, 1.0, 1.0);
            let gap = optimal_m(&th, k, Detector::Mrc).unwrap() - optimal_m(&th, k, Detector::Zf).unwrap();
            let expected = (k - 1.0) * (2f64.powf(rate / k) - 2.0);
            prop_assume!(expected.is_finite() && expected.abs() < 1e12);
            prop_assert!((gap - expected).abs() <= 1e-9 * (1.0 + expected.abs()) + 1e-9 * optimal_m(&th, k, Detector::Mrc).unwrap());
        }

        #[test]
        fn am_gm_lower_bound(k in 1.0f64..50.0, rate in 0.1f64..60.0, rr in 0.01f64..100.0, alpha in 1.1f64..5.0, t in 1e-3f64..1e4) {
            let th = theta(rate, alpha, rr, 1.0, 1.0);
            let c = alpha * k * pow2_minus_one(rate / k);
            prop_assume!(c.is_finite());
            let h = h_mrc(k, &th).unwrap();
            prop_assert!(t * rr + c / t >= h * (1.0 - 1e-12));
            let t_opt = (c / rr).sqrt();
            prop_assert!(((t_opt * rr + c / t_opt) - h).abs() <= 1e-12 * h);
        }
    }

    #[test]
    fn k_max_bound_and_guards() {
        let th = theta(10.0, 2.0, 1.0, 0.0, 1.0);
        assert_eq!(
            minimize_relaxed(&th, Detector::Mrc, &RelaxOptions::default()),
            Err(Error::UnboundedSearch)
        );
        let opts = RelaxOptions { k_max: Some(200.0), ..Default::default() };
        let r = minimize_relaxed(&th, Detector::Mrc, &opts).unwrap();
        assert_eq!(r.diagnostics.k_max, 200.0);
        let bad = RelaxOptions { k_max: Some(0.5), ..Default::default() };
        assert!(minimize_relaxed(&th, Detector::Mrc, &bad).is_err());
    }

    /// Dense linear grid over `K` with 10x the solver's resolution near the
    /// optimum, then local ternary polishing.
    fn dense_oracle(th: &SystemParams, det: Detector, k_hi: f64) -> (f64, f64) {
        let n = 40_960usize;
        let mut best = (f64::INFINITY, 1.0);
        for i in 0..=n {
            let k = 1.0 + (k_hi - 1.0) * i as f64 / n as f64;
            let v = relaxed_power(k, th, det);
            if v < best.0 {
                best = (v, k);
            }
        }
        let step = (k_hi - 1.0) / n as f64;
        let (mut lo, mut hi) = ((best.1 - step).max(1.0), (best.1 + step).min(k_hi));
        for _ in 0..300 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if relaxed_power(a, th, det) < relaxed_power(b, th, det) {
                hi = b
            } else {
                lo = a
            }
        }
        let k = 0.5 * (lo + hi);
        (relaxed_power(k, th, det).min(best.0), k)
    }

    #[test]
    fn matches_dense_grid_oracle() {
        for rate in [50.0, 200.0, 800.0] {
            let th = theta(rate, 2.0, 1e3, 1e3, 1e3);
            for det in Detector::ALL {
                let r = minimize_relaxed(&th, det, &RelaxOptions::default()).unwrap();
                let (oracle, _) = dense_oracle(&th, det, 2.0 * rate);
                assert!(
                    ((r.objective - oracle) / oracle).abs() < 1e-6,
                    "R={rate} {det}: {} vs {oracle}",
                    r.objective
                );
                assert!(r.objective <= oracle * (1.0 + 1e-12));
                assert_relative_eq!(r.objective, rate / r.zeta, max_relative = 1e-12);
                assert_relative_eq!(r.m_star, optimal_m(&th, r.k_star, det).unwrap(), max_relative = 1e-9);
                let cfg = AntennaConfig::real(r.m_star, r.k_star).unwrap();
                assert!(is_feasible(&cfg, rate, det));
            }
        }
    }

    #[test]
    fn dominates_random_feasible_points() {
        let th = theta(30.0, 2.0, 2.0, 3.0, 5.0);
        let r = minimize_relaxed(&th, Detector::Mrc, &RelaxOptions::default()).unwrap();
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        while checked < 100 {
            let k = 1.0 + 60.0 * next();
            let load = interference_load(k, pow2_minus_one(30.0 / k));
            let m = 1.0 + load + 1e-3 + 400.0 * next();
            let cfg = AntennaConfig::real(m, k).unwrap();
            if let Ok(rep) = evaluate(&cfg, &th, Detector::Mrc) {
                assert!(rep.zeta <= r.zeta * (1.0 + 1e-12));
                checked += 1;
            }
        }
    }

    #[test]
    fn rho_s_shift_leaves_argmin() {
        let with = theta(120.0, 2.0, 10.0, 5.0, 40.0);
        let without = theta(120.0, 2.0, 10.0, 5.0, 0.0);
        for det in Detector::ALL {
            // pin k_max so both runs share the same grid
            let opts = RelaxOptions { k_max: Some(500.0), ..Default::default() };
            let a = minimize_relaxed(&with, det, &opts).unwrap();
            let b = minimize_relaxed(&without, det, &opts).unwrap();
            assert_relative_eq!(a.k_star, b.k_star, max_relative = 1e-6);
            assert_relative_eq!(a.objective, b.objective + 40.0, max_relative = 1e-12);
        }
    }
}
