//! The five commands. Each one maps an effective configuration to an
//! [`Outcome`]; writing files and choosing the exit code is left to the
//! caller.

use std::fmt::Write as _;
use std::str::FromStr;

use semimarkov::limits::{limit_parameters_with, theta, LimitOptions, LimitParameters};
use semimarkov::regen::harvest_cycles;
use semimarkov::simulate::{sample_markov_renewal, scaled_integral_path};
use semimarkov::telegraph::{alternating_poisson_table, telegraph_limit, telegraph_state_law};
use semimarkov::verify::{
    clt_suite, ergodic_suite, gamma2_suite, mixing_suite, occupancy_suite, renewal_suite, residual_suite,
    wald_suite, CltOptions, ErgodicOptions, Gamma2Options, MixingOptions, OccupancyOptions, RenewalOptions,
    ResidualOptions, VerificationReport, WaldOptions,
};
use semimarkov::{validate_kernel, ChainStructure, Initial, LimitMethod, Mode, SemiMarkovKernel};
use serde::Serialize;

use crate::config::{RunConfig, SchemaError};
use crate::error::LabError;
use crate::output::{header, json, Csv};
use crate::runner::RayonRunner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Analyze,
    Simulate,
    Verify,
    Telegraph,
}

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    /// Full file contents, header line included.
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Printed on standard output.
    pub stdout: String,
    pub files: Vec<Artifact>,
    /// False only when a verification check failed.
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn file(&self, name: &str) -> Option<&Artifact> {
        self.files.iter().find(|a| a.name == name)
    }
}

struct Emitter {
    header: String,
    files: Vec<Artifact>,
}

impl Emitter {
    fn new(config: &RunConfig) -> Self {
        Self {
            header: header(config),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, body: String) {
        self.files.push(Artifact {
            name: name.into(),
            contents: format!("{}{body}", self.header),
        });
    }

    fn finish(self, stdout: String, passed: bool) -> Outcome {
        Outcome {
            stdout,
            files: self.files,
            passed,
        }
    }
}

pub fn run_command(command: Command, config: &RunConfig, runner: &RayonRunner) -> Result<Outcome, LabError> {
    config.validate().map_err(crate::config::ConfigError::from)?;
    match command {
        Command::Validate => validate(config),
        Command::Analyze => analyze(config, runner),
        Command::Simulate => simulate(config, runner),
        Command::Verify => verify(config, runner),
        Command::Telegraph => telegraph(config),
    }
}

fn kernel(config: &RunConfig) -> Result<SemiMarkovKernel, LabError> {
    config
        .kernel()
        .map_err(|e| LabError::Config(crate::config::ConfigError::from(e)))
}

fn validate(config: &RunConfig) -> Result<Outcome, LabError> {
    let structure: ChainStructure = validate_kernel(&kernel(config)?);
    let body = json(&structure);
    let mut out = Emitter::new(config);
    out.add("structure.json", body.clone());
    Ok(out.finish(body, true))
}

#[derive(Serialize)]
struct AnalyzeRecord<'a> {
    theta: f64,
    mu: f64,
    gamma2: f64,
    diffusion: f64,
    method: LimitMethod,
    slem: f64,
    pi: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma2_std_error: Option<f64>,
}

fn limit_options(config: &RunConfig) -> LimitOptions {
    LimitOptions {
        tol: config.tol,
        n_cycles: config.n_cycles,
        reference_state: config.v0,
        seed: config.seed,
    }
}

/// The limit parameters shared by `analyze` and the CLT suite.
pub fn limits(config: &RunConfig, runner: &RayonRunner) -> Result<LimitParameters, LabError> {
    Ok(limit_parameters_with(&kernel(config)?, &limit_options(config), runner)?)
}

fn analyze(config: &RunConfig, runner: &RayonRunner) -> Result<Outcome, LabError> {
    let kernel = kernel(config)?;
    let structure = validate_kernel(&kernel);
    let params = limit_parameters_with(&kernel, &limit_options(config), runner)?;
    let record = AnalyzeRecord {
        theta: params.theta,
        mu: params.mu,
        gamma2: params.gamma2,
        diffusion: params.diffusion,
        method: params.method,
        slem: structure.slem,
        pi: structure.pi()?,
        gamma2_std_error: params.gamma2_std_error,
    };
    let body = json(&record);
    let mut out = Emitter::new(config);
    out.add("analyze.json", body.clone());
    Ok(out.finish(body, true))
}

fn simulate(config: &RunConfig, runner: &RayonRunner) -> Result<Outcome, LabError> {
    let kernel = kernel(config)?;
    let structure = validate_kernel(&kernel);
    let th = theta(&kernel, structure.pi()?);
    let grid = config.grid.points().map_err(crate::config::ConfigError::from)?;
    let start = Initial::State(config.initial_state);

    let path = scaled_integral_path(&kernel, config.lambda, th, &grid, &start, config.seed)?;
    let mut csv = Csv::new(&["t", "X_lambda"]);
    for (t, x) in grid.iter().zip(&path) {
        csv.row(&[(*t).into(), (*x).into()]);
    }
    let path_csv = csv.finish();

    let traj = sample_markov_renewal(&kernel, &start, Mode::Steps(config.steps), config.seed)?;
    let mut csv = Csv::new(&["k", "state", "xi", "S"]);
    csv.row(&[0usize.into(), traj.initial_state().into(), 0.0.into(), 0.0.into()]);
    for (k, (step, s)) in traj.steps().iter().zip(&traj.arrivals()[1..]).enumerate() {
        csv.row(&[(k + 1).into(), step.state.into(), step.sojourn.into(), (*s).into()]);
    }
    let traj_csv = csv.finish();

    let cycles = harvest_cycles(&kernel, config.v0, config.n_cycles, config.seed, runner)?;
    let mut csv = Csv::new(&["cycle_index", "length", "cycle_sum", "cycle_sum_sq"]);
    for (i, c) in cycles.iter().enumerate() {
        let sum = c.centered_sum(th);
        csv.row(&[i.into(), c.length.into(), sum.into(), (sum * sum).into()]);
    }

    let mut out = Emitter::new(config);
    out.add("path.csv", path_csv.clone());
    out.add("trajectory.csv", traj_csv);
    out.add("cycles.csv", csv.finish());
    Ok(out.finish(path_csv, true))
}

/// Suites of `verify`, in their default order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Clt,
    Renewal,
    Residual,
    Ergodic,
    Occupancy,
    Wald,
    Gamma2,
    Mixing,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Self::Clt,
        Self::Renewal,
        Self::Residual,
        Self::Ergodic,
        Self::Occupancy,
        Self::Wald,
        Self::Gamma2,
        Self::Mixing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Clt => "clt",
            Self::Renewal => "renewal",
            Self::Residual => "residual",
            Self::Ergodic => "ergodic",
            Self::Occupancy => "occupancy",
            Self::Wald => "wald",
            Self::Gamma2 => "gamma2",
            Self::Mixing => "mixing",
        }
    }
}

impl FromStr for Suite {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| SchemaError {
                field: "suites".into(),
                message: format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::ALL.map(Suite::name).join(", ")
                ),
            })
    }
}

/// Why a suite cannot run on a kernel, or `None` when it can.
fn inapplicable(suite: Suite, structure: &ChainStructure, params: &LimitParameters) -> Option<&'static str> {
    match suite {
        Suite::Clt if !(params.diffusion > 0.0) => Some("the limit variance is zero"),
        Suite::Gamma2 | Suite::Mixing if !structure.is_aperiodic() => Some("the embedded chain is periodic"),
        _ => None,
    }
}

fn verify(config: &RunConfig, runner: &RayonRunner) -> Result<Outcome, LabError> {
    let kernel = kernel(config)?;
    let structure = validate_kernel(&kernel);
    structure.pi()?;
    let params = limit_parameters_with(&kernel, &limit_options(config), runner)?;

    let requested: Vec<Suite> = config
        .suites
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()
        .map_err(crate::config::ConfigError::from)?;
    let suites: Vec<Suite> = if requested.is_empty() {
        Suite::ALL
            .into_iter()
            .filter(|&s| inapplicable(s, &structure, &params).is_none())
            .collect()
    } else {
        for &s in &requested {
            if let Some(reason) = inapplicable(s, &structure, &params) {
                return Err(LabError::Usage(format!("suite {} does not apply: {reason}", s.name())));
            }
        }
        let mut unique = Vec::new();
        for s in requested {
            if !unique.contains(&s) {
                unique.push(s);
            }
        }
        unique
    };

    let seed = config.seed;
    let grid = config.grid.points().map_err(crate::config::ConfigError::from)?;
    let mut reports: Vec<VerificationReport> = Vec::new();
    for suite in suites {
        match suite {
            Suite::Clt => {
                let options = CltOptions {
                    lambda: config.lambda,
                    t_points: config.t_points.clone(),
                    n_reps: config.n_reps,
                    seed,
                    ..CltOptions::default()
                };
                reports.push(clt_suite(&kernel, &params, &options, runner)?);
            }
            Suite::Renewal => {
                let options = RenewalOptions {
                    n_values: config.n_values.clone(),
                    grid: grid.clone(),
                    n_reps: config.sup_reps,
                    seed,
                    ..RenewalOptions::default()
                };
                reports.push(renewal_suite(&kernel, &options, runner)?);
            }
            Suite::Residual => {
                let options = ResidualOptions {
                    n_values: config.n_values.clone(),
                    n_reps: config.sup_reps,
                    seed,
                    ..ResidualOptions::default()
                };
                reports.push(residual_suite(&kernel, &options, runner)?);
            }
            Suite::Ergodic => {
                for f in config.observable_list().map_err(crate::config::ConfigError::from)? {
                    let options = ErgodicOptions {
                        f,
                        n_steps: config.n_steps,
                        seed,
                        ..ErgodicOptions::default()
                    };
                    reports.push(ergodic_suite(&kernel, &options)?);
                }
            }
            Suite::Occupancy => {
                let options = OccupancyOptions {
                    horizon: config.horizon,
                    seed,
                    ..OccupancyOptions::default()
                };
                reports.push(occupancy_suite(&kernel, &options)?);
            }
            Suite::Wald => {
                let options = WaldOptions {
                    v0: config.v0,
                    n_cycles: config.n_cycles,
                    seed,
                    ..WaldOptions::default()
                };
                reports.push(wald_suite(&kernel, &options, runner)?);
            }
            Suite::Gamma2 => {
                let options = Gamma2Options {
                    n_cycles: config.n_cycles,
                    tol: config.tol,
                    seed,
                    ..Gamma2Options::default()
                };
                reports.push(gamma2_suite(&kernel, &options, runner)?);
            }
            Suite::Mixing => reports.push(mixing_suite(&kernel, &MixingOptions::default())?),
        }
    }

    let passed = reports.iter().all(|r| r.passed);
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "{r}");
    }
    let _ = writeln!(
        text,
        "overall: {} ({} of {} reports passed)",
        if passed { "PASS" } else { "FAIL" },
        reports.iter().filter(|r| r.passed).count(),
        reports.len()
    );
    let mut out = Emitter::new(config);
    out.add("reports.json", json(&reports));
    out.add("reports.txt", text.clone());
    Ok(out.finish(text, passed))
}

#[derive(Serialize)]
struct TelegraphRecord {
    v1: f64,
    v2: f64,
    lambda1: f64,
    lambda2: f64,
    p: f64,
    drift: f64,
    diffusion: f64,
}

fn telegraph(config: &RunConfig) -> Result<Outcome, LabError> {
    let section = config.telegraph.ok_or_else(|| {
        crate::config::ConfigError::from(SchemaError {
            field: "telegraph".into(),
            message: "the telegraph command needs a [telegraph] table".into(),
        })
    })?;
    let spec = section.spec().map_err(crate::config::ConfigError::from)?;
    let (drift, diffusion) = telegraph_limit(&spec);
    let record = TelegraphRecord {
        v1: spec.v1,
        v2: spec.v2,
        lambda1: spec.lambda1,
        lambda2: spec.lambda2,
        p: spec.p,
        drift,
        diffusion,
    };
    let body = json(&record);

    let mut law = Csv::new(&["t", "p_v1"]);
    for &t in &config.times {
        law.row(&[t.into(), telegraph_state_law(&spec, t).into()]);
    }
    let mut pmf = Csv::new(&["n", "probability"]);
    for (n, p) in alternating_poisson_table(spec.lambda1, spec.lambda2, section.t, section.n_max)?
        .into_iter()
        .enumerate()
    {
        pmf.row(&[n.into(), p.into()]);
    }

    let mut out = Emitter::new(config);
    out.add("telegraph.json", body.clone());
    out.add("telegraph_state_law.csv", law.finish());
    out.add("telegraph_pmf.csv", pmf.finish());
    Ok(out.finish(body, true))
}
