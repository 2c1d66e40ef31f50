//! Run configuration: a TOML document with the kernel, optional telegraph
//! parameters and flat command parameters.
//!
//! ```toml
//! seed = 42            # all keys outside the tables are optional
//! lambda = 400.0
//! grid = "0:1:0.25"    # or an explicit array [0.0, 0.5, 1.0]
//!
//! [kernel]
//! states = [1.0, -1.0]
//! transition = [[0.0, 1.0], [1.0, 0.0]]
//!
//! [[kernel.sojourn]]
//! from = 0
//! to = 1
//! family = "exponential"   # exponential | gamma | uniform | deterministic
//! rate = 1.0
//! ```
//!
//! Law parameters are `rate` (exponential), `shape` and `rate` (gamma),
//! `low` and `high` (uniform) and `value` (deterministic). When `[kernel]`
//! is absent the kernel is the one of the `[telegraph]` table.

use std::fmt;

use semimarkov::telegraph::TelegraphSpec;
use semimarkov::{Error as ModelError, Observable, SemiMarkovKernel, SojournLaw};
use serde::{Deserialize, Serialize};

/// Syntax error in the configuration text.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Well-formed text whose content is invalid; `field` names the culprit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration field `{field}`: {message}")]
pub struct SchemaError {
    pub field: String,
    pub message: String,
}

impl SchemaError {
    fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// A time grid, either `"start:end:step"` or explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    Points(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, SchemaError> {
        match self {
            Self::Points(p) => {
                if p.iter().any(|t| !t.is_finite() || *t < 0.0) || p.windows(2).any(|w| w[1] < w[0]) {
                    return Err(SchemaError::new("grid", "points must be non-negative and non-decreasing"));
                }
                Ok(p.clone())
            }
            Self::Range(text) => parse_range(text),
        }
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, SchemaError> {
    let bad = || SchemaError::new("grid", format!("expected start:end:step, got {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || start < 0.0 || end < start || step <= 0.0 {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// One sojourn law entry `F_{from,to}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SojournEntry {
    pub from: usize,
    pub to: usize,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl SojournEntry {
    fn law(&self, field: &str) -> Result<SojournLaw, SchemaError> {
        let need = |x: Option<f64>, name: &str| {
            x.ok_or_else(|| SchemaError::new(format!("{field}.{name}"), format!("required by family {:?}", self.family)))
        };
        let (law, allowed): (Result<SojournLaw, ModelError>, &[&str]) = match self.family.as_str() {
            "exponential" => (SojournLaw::exponential(need(self.rate, "rate")?), &["rate"]),
            "gamma" => (
                SojournLaw::gamma(need(self.shape, "shape")?, need(self.rate, "rate")?),
                &["shape", "rate"],
            ),
            "uniform" => (
                SojournLaw::uniform(need(self.low, "low")?, need(self.high, "high")?),
                &["low", "high"],
            ),
            "deterministic" => (SojournLaw::deterministic(need(self.value, "value")?), &["value"]),
            other => {
                return Err(SchemaError::new(
                    format!("{field}.family"),
                    format!(
                        "unsupported family {other:?}; sojourns need a finite second moment, \
                         use exponential, gamma, uniform or deterministic"
                    ),
                ))
            }
        };
        for (name, present) in [
            ("rate", self.rate.is_some()),
            ("shape", self.shape.is_some()),
            ("low", self.low.is_some()),
            ("high", self.high.is_some()),
            ("value", self.value.is_some()),
        ] {
            if present && !allowed.contains(&name) {
                return Err(SchemaError::new(
                    format!("{field}.{name}"),
                    format!("not a parameter of family {:?}", self.family),
                ));
            }
        }
        law.map_err(|e| SchemaError::new(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub states: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    #[serde(default)]
    pub sojourn: Vec<SojournEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TelegraphSection {
    pub v1: f64,
    pub v2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default = "defaults::half")]
    pub p: f64,
    /// Time at which the counting PMF is tabulated.
    #[serde(default = "defaults::one")]
    pub t: f64,
    #[serde(default = "defaults::n_max")]
    pub n_max: u64,
}

impl TelegraphSection {
    pub fn spec(&self) -> Result<TelegraphSpec, SchemaError> {
        TelegraphSpec::new(self.v1, self.v2, self.lambda1, self.lambda2, self.p)
            .map_err(|e| SchemaError::new("telegraph", e))
    }
}

mod defaults {
    pub fn seed() -> u64 {
        42
    }
    pub fn lambda() -> f64 {
        400.0
    }
    pub fn n_reps() -> usize {
        20_000
    }
    pub fn tol() -> f64 {
        1e-10
    }
    pub fn half() -> f64 {
        0.5
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn n_max() -> u64 {
        20
    }
    pub fn grid() -> super::GridSpec {
        super::GridSpec::Range("0:1:0.01".into())
    }
    pub fn t_points() -> Vec<f64> {
        vec![0.25, 0.5, 0.75, 1.0]
    }
    pub fn n_values() -> Vec<u64> {
        vec![100, 1_000, 10_000]
    }
    pub fn sup_reps() -> usize {
        100
    }
    pub fn n_cycles() -> usize {
        100_000
    }
    pub fn n_steps() -> usize {
        1_000_000
    }
    pub fn horizon() -> f64 {
        1e5
    }
    pub fn steps() -> usize {
        1_000
    }
    pub fn observables() -> Vec<String> {
        vec!["x".into(), "v*x".into()]
    }
    pub fn times() -> Vec<f64> {
        vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
    }
}

/// Everything a command needs. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Diffusive scale `λ` of `X_λ`.
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    /// Replications of the CLT suite.
    #[serde(default = "defaults::n_reps")]
    pub n_reps: usize,
    /// Truncation tolerance of the covariance series.
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    /// Time grid of `simulate` and of the renewal suite.
    #[serde(default = "defaults::grid")]
    pub grid: GridSpec,
    #[serde(default = "defaults::t_points")]
    pub t_points: Vec<f64>,
    /// Scales `n` of the renewal and residual suites.
    #[serde(default = "defaults::n_values")]
    pub n_values: Vec<u64>,
    /// Replications of the renewal and residual suites.
    #[serde(default = "defaults::sup_reps")]
    pub sup_reps: usize,
    /// Reference state of the regenerative cycles.
    #[serde(default)]
    pub v0: usize,
    #[serde(default = "defaults::n_cycles")]
    pub n_cycles: usize,
    /// Steps of the ergodic suite.
    #[serde(default = "defaults::n_steps")]
    pub n_steps: usize,
    /// Horizon of the occupancy suite.
    #[serde(default = "defaults::horizon")]
    pub horizon: f64,
    #[serde(default = "defaults::observables")]
    pub observables: Vec<String>,
    /// Suites run by `verify`; all applicable ones when empty.
    #[serde(default)]
    pub suites: Vec<String>,
    /// Initial state of `simulate`.
    #[serde(default)]
    pub initial_state: usize,
    /// Steps written to the trajectory file of `simulate`.
    #[serde(default = "defaults::steps")]
    pub steps: usize,
    /// Times at which `telegraph` tabulates the state law.
    #[serde(default = "defaults::times")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub telegraph: Option<TelegraphSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ParseError {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Canonical TOML text; `parse_config` of it gives back `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is representable in TOML")
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let positive = |x: f64, field: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(SchemaError::new(field, "must be positive"))
            }
        };
        positive(self.lambda, "lambda")?;
        positive(self.tol, "tol")?;
        positive(self.horizon, "horizon")?;
        if self.n_reps == 0 {
            return Err(SchemaError::new("n_reps", "must be positive"));
        }
        if self.t_points.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(SchemaError::new("t_points", "must be positive"));
        }
        if self.n_values.contains(&0) {
            return Err(SchemaError::new("n_values", "must be positive"));
        }
        self.grid.points()?;
        self.observable_list()?;
        let kernel = self.kernel()?;
        for (value, field) in [(self.v0, "v0"), (self.initial_state, "initial_state")] {
            if value >= kernel.len() {
                return Err(SchemaError::new(field, format!("state {value} does not exist")));
            }
        }
        if let Some(t) = &self.telegraph {
            t.spec()?;
            positive(t.t, "telegraph.t")?;
        }
        Ok(())
    }

    pub fn observable_list(&self) -> Result<Vec<Observable>, SchemaError> {
        self.observables
            .iter()
            .map(|s| s.parse().map_err(|e| SchemaError::new("observables", e)))
            .collect()
    }

    /// The kernel of `[kernel]`, or of `[telegraph]` when there is none.
    pub fn kernel(&self) -> Result<SemiMarkovKernel, SchemaError> {
        match (&self.kernel, &self.telegraph) {
            (Some(spec), _) => build_kernel(spec),
            (None, Some(t)) => t.spec()?.kernel().map_err(|e| SchemaError::new("telegraph", e)),
            (None, None) => Err(SchemaError::new("kernel", "missing; give [kernel] or [telegraph]")),
        }
    }
}

fn build_kernel(spec: &KernelSpec) -> Result<SemiMarkovKernel, SchemaError> {
    let m = spec.states.len();
    if spec.transition.len() != m {
        return Err(SchemaError::new("kernel.transition", format!("expected {m} rows")));
    }
    for (i, row) in spec.transition.iter().enumerate() {
        if row.len() != m {
            return Err(SchemaError::new(format!("P row {i}"), format!("expected {m} entries")));
        }
    }
    let mut laws = vec![vec![None; m]; m];
    for (i, entry) in spec.sojourn.iter().enumerate() {
        let field = format!("kernel.sojourn[{i}]");
        if entry.from >= m || entry.to >= m {
            return Err(SchemaError::new(field, "state index out of range"));
        }
        if laws[entry.from][entry.to].is_some() {
            return Err(SchemaError::new(field, "duplicate entry for this transition"));
        }
        laws[entry.from][entry.to] = Some(entry.law(&field)?);
    }
    SemiMarkovKernel::new(spec.states.clone(), spec.transition.clone(), laws).map_err(|e| {
        let field = match &e {
            ModelError::RowSum { row, .. } => format!("P row {row}"),
            ModelError::MissingSojournLaw { from, to } | ModelError::UnexpectedSojournLaw { from, to } => {
                format!("kernel.sojourn ({from}, {to})")
            }
            ModelError::DuplicateState(..) | ModelError::TooFewStates(_) => "kernel.states".into(),
            _ => "kernel.transition".into(),
        };
        SchemaError::new(field, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMMETRIC: &str = r#"
[kernel]
states = [1.0, -1.0]
transition = [[0.0, 1.0], [1.0, 0.0]]

[[kernel.sojourn]]
from = 0
to = 1
family = "exponential"
rate = 1.0

[[kernel.sojourn]]
from = 1
to = 0
family = "exponential"
rate = 1.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(SYMMETRIC).unwrap();
        assert_eq!(c.lambda, 400.0);
        assert_eq!(c.n_reps, 20_000);
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.seed, 42);
        assert_eq!(c.kernel().unwrap().len(), 2);
    }

    #[test]
    fn round_trip() {
        let c = parse_config(SYMMETRIC).unwrap();
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        let with_grid = format!("grid = [0.0, 0.5, 1.0]\nseed = 7\n{SYMMETRIC}");
        let c = parse_config(&with_grid).unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn row_sum_names_the_row() {
        let text = SYMMETRIC.replace("[[0.0, 1.0], [1.0, 0.0]]", "[[0.0, 0.9], [1.0, 0.0]]");
        match parse_config(&text).unwrap_err() {
            ConfigError::Schema(e) => assert_eq!(e.field, "P row 0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn heavy_tailed_family_is_rejected() {
        let text = SYMMETRIC.replacen("family = \"exponential\"\nrate = 1.0", "family = \"pareto\"\nshape = 1.5", 1);
        match parse_config(&text).unwrap_err() {
            ConfigError::Schema(e) => {
                assert_eq!(e.field, "kernel.sojourn[0].family");
                assert!(e.message.contains("second moment"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "seed = 1\nlambda = = 3\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Parse(e) => {
                assert_eq!(e.line, 2);
                assert!(e.column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_missing_fields() {
        assert!(matches!(
            parse_config(&format!("lamda = 3.0\n{SYMMETRIC}")).unwrap_err(),
            ConfigError::Parse(_)
        ));
        match parse_config("seed = 1\n").unwrap_err() {
            ConfigError::Schema(e) => assert_eq!(e.field, "kernel"),
            other => panic!("{other:?}"),
        }
        match parse_config(&format!("v0 = 5\n{SYMMETRIC}")).unwrap_err() {
            ConfigError::Schema(e) => assert_eq!(e.field, "v0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn telegraph_table_defines_kernel() {
        let c = parse_config("[telegraph]\nv1 = 2.0\nv2 = -1.0\nlambda1 = 1.0\nlambda2 = 2.0\n").unwrap();
        assert_eq!(c.kernel().unwrap().states(), &[2.0, -1.0]);
    }

    #[test]
    fn grid_ranges() {
        assert_eq!(GridSpec::Range("0:1:0.25".into()).points().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(GridSpec::Range("0:1:0.1".into()).points().unwrap().len(), 11);
        assert!(GridSpec::Range("1:0:0.1".into()).points().is_err());
        assert!(GridSpec::Range("0:1".into()).points().is_err());
    }
}
