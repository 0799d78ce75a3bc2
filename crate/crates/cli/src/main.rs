//! `pmlw`: run, sweep and validate pmlwave scenarios.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical
//! instability, 3 failed validation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pmlwave::config::ScenarioConfig;
use pmlwave::run::profile_csv;
use pmlwave::validate::{run_criterion, TITLES};
use pmlwave::{parse_config, run_scenario, Error, Simulation};
use rayon::prelude::*;
use serde_json::Value;

const OUT_ENV: &str = "PMLW_OUT";

#[derive(Parser)]
#[command(
    name = "pmlw",
    version,
    about = "FDTD scalar waves with perfectly matched layers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory (default: `$PMLW_OUT/<outputs.directory>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of one configuration key.
    Sweep {
        config: PathBuf,
        /// Dotted key, e.g. `absorbers.x_hi.sigma_max`.
        #[arg(long)]
        vary: String,
        /// Comma-separated JSON values.
        #[arg(long)]
        values: String,
        /// Concurrent runs (default: available cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Sweep root (default: `$PMLW_OUT/<outputs.directory>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Validate {
        /// Only these criteria (1-10); all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
    /// Print the sampled sigma/kappa arrays of a scenario as CSV.
    Profile { config: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Unstable(String),
    Validation,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Unstable(_) => 2,
            Failure::Validation => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Instability { .. } => Failure::Unstable(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn output_root(cfg: &ScenarioConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| {
        let root = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_default();
        root.join(&cfg.outputs.directory)
    })
}

/// Splits on commas outside brackets and braces, so array values survive.
fn split_values(list: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in list.char_indices() {
        match c {
            '[' | '{' => depth += 1,
            ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(list[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(list[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()))
}

fn dir_label(key: &str, raw: &str) -> String {
    let clean: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-.+_".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{key}={clean}")
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load(config)?;
    let dir = output_root(&cfg, out);
    let m = run_scenario(&cfg, &dir)?;
    println!(
        "{}: {} steps, dt = {:e}, {} files in {}",
        m.status,
        m.steps,
        m.dt,
        m.files.len(),
        dir.display()
    );
    Ok(())
}

fn sweep(
    config: &Path,
    vary: &str,
    values: &str,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let base = load(config)?;
    let root = output_root(&base, out);
    let raws = split_values(values);
    if raws.is_empty() {
        return Err(Failure::Config("--values is empty".into()));
    }
    // Every variant is validated before anything runs.
    let variants = raws
        .iter()
        .map(|raw| {
            let mut cfg = base
                .with_override(vary, parse_value(raw))
                .map_err(|e| Failure::Config(format!("{vary} = {raw}: {e}")))?;
            let dir = root.join(dir_label(vary, raw));
            cfg.outputs.directory = dir.to_string_lossy().into_owned();
            Ok((*raw, cfg, dir))
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Failure::Config("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Config(format!("cannot start workers: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        variants
            .par_iter()
            .map(|(raw, cfg, dir)| (*raw, dir, run_scenario(cfg, dir)))
            .collect()
    });

    println!("{vary},status,directory");
    let mut worst: Option<Failure> = None;
    for (raw, dir, result) in results {
        let status = match result {
            Ok(m) => m.status,
            Err(e) => {
                let msg = e.to_string();
                let f = Failure::from(e);
                if worst.as_ref().is_none_or(|w| f.code() > w.code()) {
                    worst = Some(f);
                }
                msg
            }
        };
        println!("{raw},{status},{}", dir.display());
    }
    worst.map_or(Ok(()), Err)
}

fn validate(only: &[u32]) -> Result<(), Failure> {
    let ids: Vec<u32> = if only.is_empty() {
        (1..=TITLES.len() as u32).collect()
    } else {
        only.to_vec()
    };
    if let Some(bad) = ids
        .iter()
        .find(|&&id| id == 0 || id as usize > TITLES.len())
    {
        return Err(Failure::Config(format!("no criterion {bad}")));
    }
    let mut passed = true;
    for id in ids {
        let report = run_criterion(id);
        println!("{}", report.line());
        passed &= report.passed;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn profile(config: &Path) -> Result<(), Failure> {
    let cfg = load(config)?;
    let scenario = cfg
        .to_scenario()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let sim = Simulation::new(&scenario)?;
    print!("{}", profile_csv(&sim.grid, &sim.coeffs));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Sweep {
            config,
            vary,
            values,
            workers,
            out,
        } => sweep(&config, &vary, &values, workers, out),
        Command::Validate { only } => validate(&only),
        Command::Profile { config } => profile(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(msg) => eprintln!("error: {msg}"),
                Failure::Unstable(msg) => eprintln!("error: {msg}"),
                Failure::Validation => eprintln!("validation failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
