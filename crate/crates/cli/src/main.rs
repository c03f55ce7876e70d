use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modubot_core::env::EnvConfig;
use modubot_core::harness::{
    cmd_eval, cmd_export_trajectory, cmd_sweep, cmd_train, load_env_for_eval, ExperimentConfig,
    RunMetadata, METADATA_FILE,
};
use modubot_core::ppo::Algorithm;
use modubot_core::{Exec, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "modubot", version, about = "Train and evaluate PPO reaching policies for modular robots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy and write params.bin, train_log.csv and metadata.json
    Train(RunArgs),
    /// Evaluate a saved policy
    Eval(EvalArgs),
    /// Train and evaluate every algorithm at every execution time
    Sweep(RunArgs),
    /// Record one deterministic episode as CSV
    ExportTraj(ExportArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "MODUBOT_SEED")]
    seed: Option<u64>,
    /// Trajectory execution time per action, seconds
    #[arg(long)]
    exec_time: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long)]
    total_timesteps: Option<usize>,
    /// Evaluation episodes after training
    #[arg(long)]
    episodes: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write zeros instead of elapsed time into train_log.csv
    #[arg(long)]
    no_wall_clock: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long)]
    episodes: Option<usize>,
    /// Sample actions instead of using the policy mean
    #[arg(long)]
    stochastic: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    params: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn experiment(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.exec_time {
        cfg.exec_time = Some(t);
    }
    Ok(cfg)
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = experiment(&args.common)?;
    if let Some(algo) = args.algo {
        cfg.algorithm = algo;
        cfg.algorithms = vec![algo];
    }
    if let Some(n) = args.total_timesteps {
        cfg.hyper.total_timesteps = n;
    }
    if let Some(n) = args.episodes {
        cfg.eval_episodes = n;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if args.no_wall_clock {
        cfg.record_wall_clock = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Environment for eval and export: `--config` if given, else the
/// `metadata.json` stored next to the params file, else the default preset.
fn eval_env(common: &Common, params: &Path) -> Result<(EnvConfig, Option<RunMetadata>)> {
    let sibling = params.parent().unwrap_or(Path::new("")).join(METADATA_FILE);
    let source = common.config.clone().or_else(|| sibling.is_file().then_some(sibling));
    let meta = match &source {
        Some(path) => RunMetadata::load(path).ok(),
        None => None,
    };
    let mut env = match &source {
        Some(path) => load_env_for_eval(path)?,
        None => ExperimentConfig::default().resolve_env()?,
    };
    if let Some(t) = common.exec_time {
        env.exec_time = t;
        env.validate()?;
    }
    Ok((env, meta))
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    let value = match cli.command {
        Command::Train(args) => {
            let cfg = run_config(&args)?;
            let summary = cmd_train(&cfg)?;
            json!({ "out_dir": cfg.out_dir, "summary": summary })
        }
        Command::Sweep(args) => {
            let cfg = run_config(&args)?;
            let table = cmd_sweep(&cfg)?;
            json!({ "out_dir": cfg.out_dir, "rows": table.rows })
        }
        Command::Eval(args) => {
            let (env, meta) = eval_env(&args.common, &args.params)?;
            let recorded = meta.as_ref().map(|m| &m.summary);
            let episodes = args
                .episodes
                .or(recorded.map(|s| s.eval.episodes))
                .unwrap_or(20);
            let seed = args.common.seed.or(recorded.map(|s| s.eval_seed)).unwrap_or(0);
            let deterministic = !args.stochastic;
            let algorithm = args.algo.or(meta.as_ref().map(|m| m.algorithm));
            let exec = meta.as_ref().map_or(Exec::default(), |m| m.hyper.exec);
            let row = cmd_eval(&args.params, &env, algorithm, episodes, deterministic, seed, exec)?;
            serde_json::to_value(row).expect("row serializes")
        }
        Command::ExportTraj(args) => {
            let (env, _) = eval_env(&args.common, &args.params)?;
            let rows = cmd_export_trajectory(&args.params, &env, &args.out)?;
            let last = rows.last().expect("trajectory has a start row");
            json!({ "out": args.out, "steps": last.step, "final_distance_mm": last.distance_mm })
        }
    };
    Ok(value)
}

fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(value) => {
            println!("{value}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            ExitCode::FAILURE
        }
    }
}
