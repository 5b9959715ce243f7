use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pohc::harness::output::{config_hash, write_run};
use pohc::harness::sweep::{expand, parse_values, run_all, write_sweep};
use pohc::harness::{run_scenario, ConfigError, ScenarioConfig};
use pohc::Exec;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "pohc", version, about = "Proof-of-human-contribution simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted key into the scenario document, e.g. `voting.honest_noise`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; each is read as JSON, else as a string.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and validate a scenario without running it.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    Ok(ScenarioConfig::from_json_str(&read(path)?)?)
}

/// `POHC_THREADS`; absent means serial.
fn threads() -> Result<Option<usize>, Failure> {
    match env::var("POHC_THREADS") {
        Err(env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::Config(format!("POHC_THREADS: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Config(format!(
                "POHC_THREADS: expected a positive integer, got {s:?}"
            ))),
        },
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Check { config } => {
            let cfg = load(&config)?;
            println!("ok {}", config_hash(&cfg));
        }
        Command::Run { config, seed, out } => {
            let mut cfg = load(&config)?;
            cfg.seed = seed;
            let result = run_scenario(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
            let manifest =
                write_run(&out, &cfg, &result).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
            println!("wrote {} (config {})", out.display(), manifest.config_sha256);
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let doc: serde_json::Value = serde_json::from_str(&read(&config)?)
                .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
            ScenarioConfig::from_value(doc.clone())?;
            let values = parse_values(&values);
            let configs = expand(&doc, &param, &values)?;
            let runs = match threads()? {
                None => run_all(&configs, Exec::Serial),
                Some(n) => Exec::with_threads(n, || run_all(&configs, Exec::Parallel)),
            };
            let runs = runs
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            write_sweep(&out, &param, &values, &configs, &runs)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
            println!("wrote {} runs to {}", runs.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("runtime error: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
