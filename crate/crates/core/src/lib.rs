//! Energy efficiency of multiuser massive-MIMO uplinks with MRC and ZF
//! receivers under a transceiver power-consumption model.
//!
//! The objective is the normalized efficiency `zeta = R / P`, with total
//! power `P = alpha K gamma + M rho_r + K rho_d + rho_s` in units of the
//! referred noise power. [`integer::optimize_exact`] finds the best integer
//! `(M, K)`, [`relaxation::minimize_relaxed`] the continuous relaxation,
//! and [`montecarlo::simulate`] checks the rate formulas against simulated
//! Rayleigh channels.

pub mod asymptotics;
pub mod efficiency;
pub mod error;
pub mod integer;
pub mod link;
pub mod montecarlo;
pub mod relaxation;
pub mod scalar;
pub mod units;

pub use asymptotics::{
    mrc_upper_bound_check, thresholds, trajectory_limit, trajectory_point, zf_vs_mrc_compare,
    BoundCheck, DetectorComparison, Thresholds, TrajectoryPoint, TrajectorySpec,
};
pub use efficiency::{evaluate, pa_power_fraction, EfficiencyReport};
pub use error::{Error, Result};
pub use integer::{optimal_pair_trace, optimize_exact, IntegerOptions, Optimum, TracePoint};
pub use link::{gamma_required, is_feasible, rate_achieved, AntennaConfig, ConfigMode, Detector};
pub use montecarlo::{bound_gap_sweep, simulate, McConfig, McResult};
pub use relaxation::{
    g_r, g_zf, h_mrc, minimize_relaxed, optimal_m, relaxed_objective, RelaxOptions, RelaxedOptimum,
};
pub use units::{denormalize_efficiency, normalize, BaseParams, PhysicalParams, SystemParams};
