//! Command-line front end: runs the experiment batteries and writes CSV
//! tables and SVG charts into an output directory.
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad flags,
//! unparsable or invalid config file), 3 if any trial ended in a collision,
//! 4 if a run that was expected to settle hit its time limit instead, and
//! 1 for everything else (I/O, internal simulation errors).

mod chart;
mod commands;
mod config;
mod output;

use carflow::{ModelKind, ScenarioKind};
use clap::{Args, Parser, Subcommand};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum AppError {
    /// Bad flags or config file; exit 2.
    Config(String),
    /// A trial ended with two vehicles touching; exit 3.
    Collision(String),
    /// A run expected to settle hit its time limit; exit 4.
    NoConvergence(String),
    /// I/O or internal failures; exit 1.
    Other(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Collision(_) => 3,
            AppError::NoConvergence(_) => 4,
            AppError::Other(_) => 1,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration: {m}"),
            AppError::Collision(m) => write!(f, "collision: {m}"),
            AppError::NoConvergence(m) => write!(f, "no convergence: {m}"),
            AppError::Other(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "carflow",
    version,
    about = "Car-following experiments: risk-adaptive IDM against reference laws"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML parameter file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for CSV and SVG output.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Base seed for the per-trial random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of trials per battery.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Integration step, s.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Simulated time limit per trial, s.
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Car-following law (repeat for compare-models): idm | seidm | krauss
    /// | derbel | clamped.
    #[arg(long = "model", global = true, value_name = "NAME")]
    models: Vec<String>,
    /// Risk exponent of the adaptive law.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Lead-vehicle schedule, e.g. "hold:95:5,ramp:-6:35.64"
    /// (hold:SPEED_KMH:DURATION_S or ramp:RATE_MPS2:TARGET_KMH).
    #[arg(long, global = true, value_name = "SPEC")]
    profile: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the risk exponent over its reference grid: analytic cruise
    /// spacing and throughput plus one simulated braking episode per point.
    SweepR,
    /// Run the randomized relaxation battery for several laws and compare
    /// their settled states (default: every law, 20 trials).
    CompareModels,
    /// Run one scenario, dumping a trajectory CSV per trial and a metrics
    /// summary.
    Scenario {
        /// relaxation | pair-braking | platoon-braking | merge
        kind: String,
    },
    /// Emit the analytic cruise-gap and approach curves as CSV plus SVG.
    Curves,
}

fn parse_models(names: &[String]) -> Result<Vec<ModelKind>, AppError> {
    names
        .iter()
        .map(|n| {
            ModelKind::from_name(n).ok_or_else(|| {
                AppError::Config(format!(
                    "unknown model '{n}'; expected one of idm, seidm, krauss, derbel, clamped"
                ))
            })
        })
        .collect()
}

/// Fully validated invocation, ready to run.
enum Plan {
    SweepR,
    CompareModels(Vec<ModelKind>),
    Scenario(ScenarioKind, ModelKind),
    Curves,
}

fn plan(command: Command, models: Vec<ModelKind>) -> Result<Plan, AppError> {
    match command {
        Command::SweepR => {
            if !models.is_empty() {
                return Err(AppError::Config(
                    "sweep-r always runs the risk-adaptive law; drop --model".into(),
                ));
            }
            Ok(Plan::SweepR)
        }
        Command::CompareModels => Ok(Plan::CompareModels(if models.is_empty() {
            ModelKind::ALL.to_vec()
        } else {
            models
        })),
        Command::Scenario { kind } => {
            let kind = ScenarioKind::from_name(&kind).ok_or_else(|| {
                AppError::Config(format!(
                    "unknown scenario '{kind}'; expected one of relaxation, pair-braking, \
                     platoon-braking, merge"
                ))
            })?;
            let model = match models.as_slice() {
                [one] => *one,
                [] => return Err(AppError::Config("scenario needs --model".into())),
                _ => {
                    return Err(AppError::Config(
                        "scenario takes exactly one --model".into(),
                    ))
                }
            };
            Ok(Plan::Scenario(kind, model))
        }
        Command::Curves => {
            if !models.is_empty() {
                return Err(AppError::Config(
                    "curves is analytic and takes no --model".into(),
                ));
            }
            Ok(Plan::Curves)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    let rc = config::load(&cli.common)?;
    let models = parse_models(&cli.common.models)?;
    let plan = plan(cli.command, models)?;
    let out_dir = &cli.common.out_dir;
    // record the effective configuration next to the outputs; feeding it
    // back through --config reproduces the run
    std::fs::create_dir_all(out_dir)
        .map_err(|e| AppError::Other(format!("{}: {e}", out_dir.display())))?;
    let rc_path = out_dir.join("run_config.toml");
    std::fs::write(&rc_path, config::to_toml(&rc))
        .map_err(|e| AppError::Other(format!("{}: {e}", rc_path.display())))?;
    println!("wrote {}", rc_path.display());
    match plan {
        Plan::SweepR => commands::sweep_r(&rc, out_dir),
        Plan::CompareModels(list) => commands::compare_models(&rc, out_dir, &list),
        Plan::Scenario(kind, model) => commands::scenario(&rc, out_dir, kind, model),
        Plan::Curves => commands::curves(&rc, out_dir),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
