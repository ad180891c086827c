use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mimo_ee_cli::config::{Config, Output, SweepSpec};
use mimo_ee_cli::report::{self, Table};
use mimo_ee_cli::CliError;

#[derive(Parser)]
#[command(name = "mimo-ee", version, about = "Energy-efficiency optimization of massive-MIMO uplinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and relaxed optimum at the config's `rate`.
    Optimize(Common),
    /// Optimal efficiency along `sweep.rates`.
    Sweep(Common),
    /// Power budget at `point` or at the exact optimum.
    Breakdown(Common),
    /// Constant per-user-rate trajectory and its limit.
    Trajectory(Common),
    /// Monte-Carlo check of the closed-form rates.
    Validate(Common),
    /// Rate thresholds and the MRC upper-bound check.
    Thresholds(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides every Monte-Carlo seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "k-max")]
    k_max: Option<u64>,
}

fn optimize(cfg: &Config, k_max: Option<u64>) -> Result<Table, CliError> {
    let spec = SweepSpec {
        rates: vec![cfg.rate()?],
        base: cfg.base_params()?,
        detectors: cfg.detectors(),
        outputs: [Output::Exact, Output::Relaxed, Output::PaFraction].into_iter().collect(),
        per_user_rate: None,
        k_max: k_max.or(cfg.k_max),
        physical: cfg.physical_params()?,
    };
    let table = report::run_sweep(&spec, true)?;
    // a single point has nowhere else to report failure
    let err = table.column("error").expect("error column");
    if let Some(report::Cell::Text(msg)) = table.rows.iter().map(|r| &r[err]).find(|c| **c != report::Cell::Empty) {
        return Err(CliError::Numerical(msg.clone()));
    }
    Ok(table)
}

fn run(command: &Command, args: &Common) -> Result<Vec<u8>, CliError> {
    let cfg = Config::load(&args.config)?;
    let k_max = args.k_max.or(cfg.k_max);
    let table = match command {
        Command::Optimize(_) => optimize(&cfg, k_max)?,
        Command::Sweep(_) => report::run_sweep(&cfg.sweep_spec(k_max)?, false)?,
        Command::Breakdown(_) => {
            let physical = cfg.physical_params()?;
            report::run_breakdown(
                &cfg.base_params()?,
                physical.as_ref(),
                &cfg.rates()?,
                &cfg.detectors(),
                cfg.point.map(|p| (p.m, p.k)),
                k_max,
            )?
        }
        Command::Trajectory(_) => {
            let t = cfg
                .trajectory
                .as_ref()
                .ok_or_else(|| CliError::Config("`trajectory` section is required".into()))?;
            report::run_trajectory(&cfg.base_params()?, t.per_user_rate, &t.rates.values()?, k_max)?
        }
        Command::Validate(_) => report::run_validation(&cfg.mc_configs(args.seed)?)?,
        Command::Thresholds(_) => report::run_thresholds(&cfg.base_params()?, &cfg.rates()?, k_max)?,
    };
    match args.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).map_err(io)?;
            stdout.flush().map_err(io)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Optimize(a)
        | Command::Sweep(a)
        | Command::Breakdown(a)
        | Command::Trajectory(a)
        | Command::Validate(a)
        | Command::Thresholds(a) => a,
    };
    let result = match args.threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))
            .and_then(|pool| pool.install(|| run(&cli.command, args))),
        None => run(&cli.command, args),
    }
    .and_then(|bytes| emit(&bytes, args.out.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
