//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array`; `NaN` marks a point the
//! optimizer could not produce (infeasible or out of range). The logic
//! lives in the plain functions so it can be tested natively.

use mimo_ee::{
    evaluate, minimize_relaxed, optimize_exact, trajectory_limit, trajectory_point, AntennaConfig,
    BaseParams, Detector, IntegerOptions, RelaxOptions, TrajectorySpec,
};
use wasm_bindgen::prelude::*;

/// Largest `(M, K)` grid the map will evaluate.
pub const MAX_MAP_CELLS: u64 = 1 << 20;

fn base(alpha: f64, rho_r: f64, rho_d: f64, rho_s: f64) -> Result<BaseParams, String> {
    BaseParams::new(alpha, rho_r, rho_d, rho_s).map_err(|e| e.to_string())
}

fn check_rates(rates: &[f64]) -> Result<(), String> {
    if rates.is_empty() || rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err("rates must be a non-empty list of positive numbers".into());
    }
    Ok(())
}

/// Per rate: `[exact_mrc, relaxed_mrc, exact_zf, relaxed_zf]`.
pub fn curves(b: &BaseParams, rates: &[f64]) -> Result<Vec<f64>, String> {
    check_rates(rates)?;
    let mut out = Vec::with_capacity(rates.len() * 4);
    for &r in rates {
        let theta = b.with_rate(r).map_err(|e| e.to_string())?;
        for det in Detector::ALL {
            let exact = optimize_exact(&theta, det, &IntegerOptions::default());
            let relaxed = minimize_relaxed(&theta, det, &RelaxOptions::default());
            out.push(exact.map_or(f64::NAN, |o| o.zeta_star));
            out.push(relaxed.map_or(f64::NAN, |o| o.zeta));
        }
    }
    Ok(out)
}

/// Efficiency on the grid `M = 1..=m_max`, `K = 1..=k_max`, row-major in `K`
/// (index `(k - 1) * m_max + (m - 1)`).
pub fn map(b: &BaseParams, rate: f64, det: Detector, m_max: u64, k_max: u64) -> Result<Vec<f64>, String> {
    if m_max == 0 || k_max == 0 || m_max.saturating_mul(k_max) > MAX_MAP_CELLS {
        return Err(format!("grid must be non-empty and at most {MAX_MAP_CELLS} cells"));
    }
    let theta = b.with_rate(rate).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity((m_max * k_max) as usize);
    for k in 1..=k_max {
        for m in 1..=m_max {
            let z = AntennaConfig::integer(m, k)
                .and_then(|cfg| evaluate(&cfg, &theta, det))
                .map_or(f64::NAN, |r| r.zeta);
            out.push(z);
        }
    }
    Ok(out)
}

/// `[limit, then per rate: K~, M~, zeta_trajectory, relaxed_mrc]`.
pub fn trajectory(b: &BaseParams, per_user_rate: f64, rates: &[f64]) -> Result<Vec<f64>, String> {
    check_rates(rates)?;
    let spec = TrajectorySpec::new(per_user_rate, *b).map_err(|e| e.to_string())?;
    let mut out = vec![trajectory_limit(&spec).map_err(|e| e.to_string())?];
    for &r in rates {
        match trajectory_point(&spec, r) {
            Ok(p) => out.extend([p.k, p.m, p.zeta]),
            Err(_) => out.extend([f64::NAN; 3]),
        }
        let relaxed = b
            .with_rate(r)
            .and_then(|t| minimize_relaxed(&t, Detector::Mrc, &RelaxOptions::default()));
        out.push(relaxed.map_or(f64::NAN, |o| o.zeta));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn optimal_curves(alpha: f64, rho_r: f64, rho_d: f64, rho_s: f64, rates: &[f64]) -> Result<Vec<f64>, JsError> {
    base(alpha, rho_r, rho_d, rho_s)
        .and_then(|b| curves(&b, rates))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn efficiency_map(
    alpha: f64,
    rho_r: f64,
    rho_d: f64,
    rho_s: f64,
    rate: f64,
    detector: &str,
    m_max: u32,
    k_max: u32,
) -> Result<Vec<f64>, JsError> {
    let det: Detector = detector.parse().map_err(|e: mimo_ee::Error| JsError::new(&e.to_string()))?;
    base(alpha, rho_r, rho_d, rho_s)
        .and_then(|b| map(&b, rate, det, m_max as u64, k_max as u64))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trajectory_curve(
    alpha: f64,
    rho_r: f64,
    rho_d: f64,
    rho_s: f64,
    per_user_rate: f64,
    rates: &[f64],
) -> Result<Vec<f64>, JsError> {
    base(alpha, rho_r, rho_d, rho_s)
        .and_then(|b| trajectory(&b, per_user_rate, rates))
        .map_err(|e| JsError::new(&e))
}
