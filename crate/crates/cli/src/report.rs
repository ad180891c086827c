//! Report tables and the computations behind each subcommand.
//!
//! Every numeric cell is the library's return value written with Rust's
//! shortest round-trip float formatting, so a CSV value parses back to the
//! exact `f64` the library produced.

use mimo_ee::{
    denormalize_efficiency, evaluate, minimize_relaxed, mrc_upper_bound_check, optimize_exact,
    simulate, thresholds, trajectory_limit, trajectory_point, zf_vs_mrc_compare, AntennaConfig,
    BaseParams, Detector, EfficiencyReport, IntegerOptions, McConfig, PhysicalParams,
    RelaxOptions, TrajectorySpec,
};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{Output, SweepSpec};
use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 12] = [
    "R",
    "detector",
    "M_star",
    "K_star",
    "zeta_star",
    "zeta_relaxed",
    "ratio",
    "pa_fraction",
    "power_pa",
    "power_bs",
    "power_users",
    "power_residual",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Empty
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.clone(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}

fn err_cell(errors: &[String]) -> Cell {
    if errors.is_empty() {
        Cell::Empty
    } else {
        Cell::Text(errors.join("; "))
    }
}

fn relax_opts(k_max: Option<u64>) -> RelaxOptions {
    RelaxOptions {
        k_max: k_max.map(|k| k as f64),
        ..RelaxOptions::default()
    }
}

fn power_cells(r: &EfficiencyReport) -> [Cell; 4] {
    [
        Cell::num(r.power_pa),
        Cell::num(r.power_bs_antennas),
        Cell::num(r.power_user_circuits),
        Cell::num(r.power_residual),
    ]
}

/// One row per `(R, detector)`, rates outer, detectors in sweep order.
///
/// Extra columns follow the fixed header: `zeta_trajectory` and `mrc_less`
/// when those outputs are requested, `eta_star` in physical mode when
/// `with_eta` is set, and always `error` last.
pub fn run_sweep(spec: &SweepSpec, with_eta: bool) -> Result<Table, CliError> {
    spec.validate()?;
    let traj = spec.has(Output::Trajectory);
    let cmp = spec.has(Output::Comparison);
    let eta = with_eta && spec.physical.is_some();
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if traj {
        header.push("zeta_trajectory");
    }
    if cmp {
        header.push("mrc_less");
    }
    if eta {
        header.push("eta_star");
    }
    header.push("error");

    let traj_spec = match (traj, spec.per_user_rate) {
        (true, Some(c)) => Some(TrajectorySpec::new(c, spec.base).map_err(CliError::from_param)?),
        _ => None,
    };

    let blocks: Vec<Vec<Vec<Cell>>> = spec
        .rates
        .par_iter()
        .map(|&rate| sweep_rows(spec, rate, traj_spec.as_ref(), cmp, eta))
        .collect();

    let mut table = Table::new(&header);
    for row in blocks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}

fn sweep_rows(
    spec: &SweepSpec,
    rate: f64,
    traj_spec: Option<&TrajectorySpec>,
    cmp: bool,
    eta: bool,
) -> Vec<Vec<Cell>> {
    let ropts = relax_opts(spec.k_max);
    let iopts = IntegerOptions { k_max: spec.k_max };
    let want_exact = spec.has(Output::Exact) || spec.has(Output::PaFraction);
    let want_relaxed = spec.has(Output::Relaxed);

    let comparison = cmp.then(|| zf_vs_mrc_compare(&spec.base, &[rate], &ropts).map(|v| v[0]));

    spec.detectors
        .iter()
        .map(|&det| {
            let mut errors = Vec::new();
            let mut row = vec![Cell::num(rate), Cell::Text(det.to_string())];
            let theta = match spec.base.with_rate(rate) {
                Ok(t) => Some(t),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            };

            let exact = match (&theta, want_exact) {
                (Some(t), true) => optimize_exact(t, det, &iopts)
                    .map_err(|e| errors.push(format!("exact: {e}")))
                    .ok(),
                _ => None,
            };
            let relaxed = match (&theta, want_relaxed) {
                (Some(t), true) => minimize_relaxed(t, det, &ropts)
                    .map_err(|e| errors.push(format!("relaxed: {e}")))
                    .ok(),
                _ => None,
            };

            match &exact {
                Some(o) => {
                    row.push(Cell::Int(o.m_star));
                    row.push(Cell::Int(o.k_star));
                    row.push(Cell::num(o.zeta_star));
                }
                None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            row.push(relaxed.as_ref().map_or(Cell::Empty, |r| Cell::num(r.zeta)));
            row.push(match (&exact, &relaxed) {
                (Some(o), Some(r)) => Cell::num(o.zeta_star / r.zeta),
                _ => Cell::Empty,
            });
            match &exact {
                Some(o) => {
                    row.push(Cell::num(o.report.pa_fraction));
                    row.extend(power_cells(&o.report));
                }
                None => row.extend(std::iter::repeat_n(Cell::Empty, 5)),
            }

            if let Some(ts) = traj_spec {
                // the trajectory is an MRC construction
                row.push(match det {
                    Detector::Mrc => match trajectory_point(ts, rate) {
                        Ok(p) => Cell::num(p.zeta),
                        Err(e) => {
                            errors.push(format!("trajectory: {e}"));
                            Cell::Empty
                        }
                    },
                    Detector::Zf => Cell::Empty,
                });
            }
            if let Some(c) = &comparison {
                row.push(match c {
                    Ok(c) => Cell::Bool(c.mrc_less),
                    Err(e) => {
                        errors.push(format!("comparison: {e}"));
                        Cell::Empty
                    }
                });
            }
            if eta {
                let p = spec.physical.as_ref().expect("physical mode");
                row.push(match &exact {
                    Some(o) => match denormalize_efficiency(o.zeta_star, p) {
                        Ok(v) => Cell::num(v),
                        Err(e) => {
                            errors.push(format!("eta: {e}"));
                            Cell::Empty
                        }
                    },
                    None => Cell::Empty,
                });
            }
            row.push(err_cell(&errors));
            row
        })
        .collect()
}

pub const BREAKDOWN_HEADER: [&str; 14] = [
    "R",
    "detector",
    "M",
    "K",
    "gamma",
    "zeta",
    "eta",
    "power_pa",
    "power_bs",
    "power_users",
    "power_residual",
    "total",
    "pa_fraction",
    "error",
];

/// Power budget at a fixed `(M, K)` or, without one, at the exact optimum.
pub fn run_breakdown(
    base: &BaseParams,
    physical: Option<&PhysicalParams>,
    rates: &[f64],
    detectors: &[Detector],
    point: Option<(u64, u64)>,
    k_max: Option<u64>,
) -> Result<Table, CliError> {
    if detectors.is_empty() {
        return Err(CliError::Config("detector set is empty".into()));
    }
    if let Some((m, k)) = point {
        AntennaConfig::integer(m, k).map_err(CliError::from_param)?;
    }
    let iopts = IntegerOptions { k_max };
    let rows: Vec<Vec<Vec<Cell>>> = rates
        .par_iter()
        .map(|&rate| {
            detectors
                .iter()
                .map(|&det| {
                    let result = base.with_rate(rate).and_then(|theta| match point {
                        Some((m, k)) => {
                            let rep = evaluate(&AntennaConfig::integer(m, k)?, &theta, det)?;
                            Ok((m, k, rep))
                        }
                        None => optimize_exact(&theta, det, &iopts).map(|o| (o.m_star, o.k_star, o.report)),
                    });
                    let mut row = vec![Cell::num(rate), Cell::Text(det.to_string())];
                    match result {
                        Ok((m, k, rep)) => {
                            let eta = physical
                                .and_then(|p| denormalize_efficiency(rep.zeta, p).ok())
                                .map_or(Cell::Empty, Cell::num);
                            row.extend([Cell::Int(m), Cell::Int(k), Cell::num(rep.gamma), Cell::num(rep.zeta), eta]);
                            row.extend(power_cells(&rep));
                            row.extend([Cell::num(rep.total_power()), Cell::num(rep.pa_fraction), Cell::Empty]);
                        }
                        Err(e) => {
                            row.extend(std::iter::repeat_n(Cell::Empty, 11));
                            row.push(Cell::Text(e.to_string()));
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    let mut table = Table::new(&BREAKDOWN_HEADER);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "R",
    "c",
    "K_tilde",
    "M_tilde",
    "zeta_trajectory",
    "zeta_limit",
    "zeta_relaxed_mrc",
    "error",
];

pub fn run_trajectory(
    base: &BaseParams,
    per_user_rate: f64,
    rates: &[f64],
    k_max: Option<u64>,
) -> Result<Table, CliError> {
    let spec = TrajectorySpec::new(per_user_rate, *base).map_err(CliError::from_param)?;
    let limit = trajectory_limit(&spec).map_err(CliError::from_param)?;
    let ropts = relax_opts(k_max);
    let rows: Vec<Vec<Cell>> = rates
        .par_iter()
        .map(|&rate| {
            let mut errors = Vec::new();
            let mut row = vec![Cell::num(rate), Cell::num(per_user_rate)];
            match trajectory_point(&spec, rate) {
                Ok(p) => row.extend([Cell::num(p.k), Cell::num(p.m), Cell::num(p.zeta)]),
                Err(e) => {
                    errors.push(format!("trajectory: {e}"));
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
                }
            }
            row.push(Cell::num(limit));
            let relaxed = base
                .with_rate(rate)
                .and_then(|t| minimize_relaxed(&t, Detector::Mrc, &ropts));
            row.push(match relaxed {
                Ok(r) => Cell::num(r.zeta),
                Err(e) => {
                    errors.push(format!("relaxed: {e}"));
                    Cell::Empty
                }
            });
            row.push(err_cell(&errors));
            row
        })
        .collect();
    let mut table = Table::new(&TRAJECTORY_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const THRESHOLDS_HEADER: [&str; 9] = [
    "R",
    "R1",
    "R2",
    "hypotheses_met",
    "zeta_relaxed_mrc",
    "zeta_relaxed_zf",
    "bound",
    "holds",
    "error",
];

/// Rate thresholds and, where they are met, the MRC upper-bound check.
pub fn run_thresholds(base: &BaseParams, rates: &[f64], k_max: Option<u64>) -> Result<Table, CliError> {
    let ropts = relax_opts(k_max);
    let rows: Vec<Vec<Cell>> = rates
        .par_iter()
        .map(|&rate| {
            let mut row = vec![Cell::num(rate)];
            let theta = match base.with_rate(rate) {
                Ok(t) => t,
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 7));
                    row.push(Cell::Text(e.to_string()));
                    return row;
                }
            };
            let th = match thresholds(&theta) {
                Ok(th) => th,
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 7));
                    row.push(Cell::Text(e.to_string()));
                    return row;
                }
            };
            let met = rate > th.max();
            row.extend([Cell::num(th.r1), Cell::num(th.r2), Cell::Bool(met)]);
            if !met {
                row.extend(std::iter::repeat_n(Cell::Empty, 5));
                return row;
            }
            match mrc_upper_bound_check(&theta, &ropts) {
                Ok(b) => row.extend([
                    Cell::num(b.zeta_mrc),
                    Cell::num(b.zeta_zf),
                    Cell::num(b.bound),
                    Cell::Bool(b.holds),
                    Cell::Empty,
                ]),
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 4));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            row
        })
        .collect();
    let mut table = Table::new(&THRESHOLDS_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const VALIDATION_HEADER: [&str; 13] = [
    "m",
    "k",
    "gamma",
    "detector",
    "trials",
    "seed",
    "empirical_rate",
    "ci_halfwidth",
    "bound_rate",
    "margin",
    "resampled",
    "lower_bound_ok",
    "error",
];

/// Monte-Carlo rows in input order. `lower_bound_ok` means the closed-form
/// rate does not exceed the empirical mean by more than the CI half-width.
pub fn run_validation(configs: &[McConfig]) -> Result<Table, CliError> {
    if configs.is_empty() {
        return Err(CliError::Config("no Monte-Carlo configurations".into()));
    }
    for c in configs {
        c.validate().map_err(CliError::from_param)?;
    }
    let mut table = Table::new(&VALIDATION_HEADER);
    for c in configs {
        let mut row = vec![
            Cell::Int(c.m as u64),
            Cell::Int(c.k as u64),
            Cell::num(c.gamma),
            Cell::Text(c.detector.to_string()),
            Cell::Int(c.trials),
            Cell::Int(c.seed),
        ];
        match simulate(c) {
            Ok(r) => row.extend([
                Cell::num(r.empirical_rate),
                Cell::num(r.ci_halfwidth),
                Cell::num(r.bound_rate),
                Cell::num(r.margin),
                Cell::Int(r.resampled),
                Cell::Bool(r.margin >= -r.ci_halfwidth),
                Cell::Empty,
            ]),
            Err(e) => {
                row.extend(std::iter::repeat_n(Cell::Empty, 6));
                row.push(Cell::Text(e.to_string()));
            }
        }
        table.push(row);
    }
    Ok(table)
}
