//! Argument parsing and file output of the `smlab` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{run_command, Command, Outcome};
use crate::config::{parse_config, ConfigError, GridSpec, RunConfig};
use crate::error::LabError;
use crate::runner::{default_workers, RayonRunner};

/// Semi-Markov process laboratory: limit parameters, simulation and
/// verification of the limit theorems.
#[derive(Debug, Parser)]
#[command(name = "smlab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CommandArg {
    /// Irreducibility, period, invariant law and SLEM of the embedded chain.
    Validate,
    /// Drift, mean sojourn, limit variance and diffusion coefficient.
    Analyze,
    /// Scaled path, trajectory and cycle summaries as CSV.
    Simulate,
    /// Run verification suites.
    Verify,
    /// Closed-form telegraph drift, diffusion, state law and counting PMF.
    Telegraph,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Validate => Command::Validate,
            CommandArg::Analyze => Command::Analyze,
            CommandArg::Simulate => Command::Simulate,
            CommandArg::Verify => Command::Verify,
            CommandArg::Telegraph => Command::Telegraph,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; never changes the output.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Directory for the emitted files; nothing is written without it.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Comma-separated suites for `verify`.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub suites: Option<Vec<String>>,
    #[arg(long, global = true, value_name = "F")]
    pub lambda: Option<f64>,
    /// Replications of the CLT suite.
    #[arg(long, global = true, value_name = "N")]
    pub reps: Option<usize>,
    /// Time grid `start:end:step`.
    #[arg(long, global = true, value_name = "GRID")]
    pub grid: Option<String>,
}

impl Options {
    /// Reads the configuration file and applies the flag overrides.
    pub fn effective_config(&self) -> Result<RunConfig, LabError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| LabError::Usage("--config PATH is required".into()))?;
        let text = fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.clone(),
            source,
        })?;
        let mut config = parse_config(&text)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(lambda) = self.lambda {
            config.lambda = lambda;
        }
        if let Some(reps) = self.reps {
            config.n_reps = reps;
        }
        if let Some(grid) = &self.grid {
            config.grid = GridSpec::Range(grid.clone());
        }
        if let Some(suites) = &self.suites {
            config.suites = suites.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        }
        config.validate().map_err(ConfigError::from)?;
        Ok(config)
    }
}

fn write_files(dir: &Path, outcome: &Outcome) -> Result<(), LabError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LabError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for artifact in &outcome.files {
        let path = dir.join(&artifact.name);
        fs::write(&path, &artifact.contents).map_err(io(&path))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome, LabError> {
    let config = cli.options.effective_config()?;
    let workers = cli.options.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(LabError::Usage("--workers must be at least 1".into()));
    }
    let runner = RayonRunner::new(workers).map_err(|e| LabError::Usage(e.to_string()))?;
    let outcome = run_command(cli.command.into(), &config, &runner)?;
    if let Some(dir) = &cli.options.out {
        write_files(dir, &outcome)?;
    }
    Ok(outcome)
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 when a verification check failed, 2 on usage, configuration or model
/// errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("smlab: {e}");
            e.exit_code()
        }
    }
}
