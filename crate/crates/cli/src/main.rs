use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use testdrift::pipeline::{CacheModeConfig, PipelineError, Run, RunConfig, Stage, StageStatus};

/// Mutation-driven evaluation of LLM-generated test suites.
#[derive(Debug, Parser)]
#[command(name = "testdrift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct Opts {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "testdrift.toml")]
    config: PathBuf,
    /// Run directory.
    #[arg(long, global = true, default_value = "run")]
    run: PathBuf,
    /// Base URL of an OpenAI-compatible endpoint (overrides the config).
    #[arg(long, global = true)]
    provider: Option<String>,
    /// Model name (overrides the config).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Answer model calls (and executions, if an execution archive is
    /// configured) only from this archive.
    #[arg(long, global = true, value_name = "DIR", conflicts_with = "record")]
    replay: Option<PathBuf>,
    /// Persist every model answer into the archive.
    #[arg(long, global = true)]
    record: bool,
    /// Rerun stages that already completed.
    #[arg(long, global = true)]
    force: bool,
    /// Print machine-readable stage status, one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Scan the corpus, filter and stratify programs.
    Ingest,
    /// Generate baseline suites and select passing programs per band.
    Baseline,
    /// Apply every enabled operator and screen the mutants.
    Mutate,
    /// Generate suites for the surviving mutants.
    Generate,
    /// Run each mutant's suite against the mutant.
    Evaluate,
    /// Classify failing tests on SAC mutants.
    Attribute,
    /// Match variant suites against baseline suites.
    Churn,
    /// Write summary.md and the CSV tables.
    Report,
    /// Every stage in order.
    RunAll,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        Some(match self {
            Command::Ingest => Stage::Ingest,
            Command::Baseline => Stage::Baseline,
            Command::Mutate => Stage::Mutate,
            Command::Generate => Stage::Generate,
            Command::Evaluate => Stage::Evaluate,
            Command::Attribute => Stage::Attribute,
            Command::Churn => Stage::Churn,
            Command::Report => Stage::Report,
            Command::RunAll => return None,
        })
    }
}

fn load_config(opts: &Opts) -> Result<RunConfig, PipelineError> {
    let mut config = RunConfig::load(&opts.config)?;
    if let Some(url) = &opts.provider {
        config.provider.base_url = url.clone();
    }
    if let Some(model) = &opts.model {
        config.provider.model = model.clone();
    }
    if let Some(dir) = &opts.replay {
        config.cache.mode = CacheModeConfig::Replay;
        config.cache.llm_dir = Some(std::path::absolute(dir).unwrap_or_else(|_| dir.clone()));
    } else if opts.record {
        config.cache.mode = CacheModeConfig::Record;
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<Vec<StageStatus>, PipelineError> {
    let config = load_config(&cli.opts)?;
    let mut run = Run::open(&cli.opts.run, config)?;
    match cli.command.stage() {
        Some(stage) => Ok(vec![run.run_stage(stage, cli.opts.force)?]),
        None => run.run_all(cli.opts.force),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(statuses) => {
            for s in &statuses {
                if cli.opts.json {
                    println!("{}", serde_json::to_string(s).expect("status serialises"));
                } else {
                    println!(
                        "{:<10} {:<9} {}",
                        s.stage,
                        s.action,
                        &s.digest[..s.digest.len().min(16)]
                    );
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.exit_code();
            let hint = e.hint();
            if cli.opts.json {
                println!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "hint": hint, "exit_code": code })
                );
            }
            log::error!("{e}");
            eprintln!("hint: {hint}");
            ExitCode::from(code as u8)
        }
    }
}
