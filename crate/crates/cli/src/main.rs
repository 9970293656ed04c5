use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use anyhow::Context as _;
use clap::{Parser, ValueEnum};
use dpsim::{dispatch, load_config, oracle_query, CliError, Command, ExitCode, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Run,
    Estimate,
    Verify,
    Explore,
    Oracle,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Command {
        match c {
            CommandArg::Run => Command::Run,
            CommandArg::Estimate => Command::Estimate,
            CommandArg::Verify => Command::Verify,
            CommandArg::Explore => Command::Explore,
            CommandArg::Oracle => Command::Oracle,
        }
    }
}

/// Dining philosophers simulator: runs, estimates, verifications,
/// explorations and exact oracles.
///
/// Exit status: 0 success, 1 a verification or check failed, 2 invalid
/// configuration or arguments, 3 runtime failure.
#[derive(Debug, Parser)]
#[command(name = "dpsim", version)]
struct Cli {
    command: CommandArg,
    /// Direct oracle queries: `distinct M K`, `enumerate M K`, `product P M`.
    #[arg(trailing_var_arg = true)]
    query: Vec<String>,
    /// Experiment configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    /// Worker threads for trial batches; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for artifacts (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    let command = Command::from(cli.command);
    let Some(path) = cli.config else {
        if command == Command::Oracle && !cli.query.is_empty() {
            let answer = oracle_query(&cli.query)?;
            let _ = writeln!(std::io::stdout(), "{answer}");
            return Ok(ExitCode::Success);
        }
        return Err(CliError::Usage(format!("`{command}` needs --config FILE")));
    };
    if !cli.query.is_empty() {
        return Err(CliError::Usage(format!(
            "unexpected arguments with --config: {}",
            cli.query.join(" ")
        )));
    }
    let mut cfg = load_config(&path)?;
    Overrides {
        seed: cli.seed,
        trials: cli.trials,
        horizon: cli.horizon,
        workers: cli.workers,
    }
    .apply(&mut cfg)?;
    let outcome = dispatch(command, &cfg, &cli.out)?;
    // A closed pipe (e.g. `| head`) must not turn a finished run into a panic.
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", outcome.summary);
    for f in &outcome.files {
        let _ = writeln!(stdout, "wrote {}", f.display());
    }
    Ok(outcome.exit_code())
}

fn main() -> ProcessExit {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ProcessExit::from(if e.use_stderr() { ExitCode::ConfigError as u8 } else { 0 });
        }
    };
    match execute(cli).context("dpsim") {
        Ok(code) => ProcessExit::from(code as u8),
        Err(e) => {
            let code = e.downcast_ref::<CliError>().map_or(ExitCode::RuntimeError, CliError::exit_code);
            eprintln!("error: {e:#}");
            ProcessExit::from(code as u8)
        }
    }
}
