//! Statistical checks of the limit theorems, one suite per theorem.
//!
//! Every suite is a pure function of its inputs and seed. Replication `r`
//! always draws from its own stream, replications are merged in index
//! order, and so a report does not depend on the [`Runner`] used.
//!
//! [`Runner`]: crate::exec::Runner

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

mod clt;
mod ergodic;
mod ks;
mod mixing;
mod occupancy;
mod regenerative;
mod renewal;
mod residual;

pub use clt::{clt_suite, CltOptions};
pub use ergodic::{ergodic_suite, ErgodicOptions};
pub use ks::{ks_statistic, ks_statistic_ungated, Cdf, KsResult, KS_MIN_SAMPLES};
pub use mixing::{mixing_suite, MixingOptions};
pub use occupancy::{occupancy_suite, OccupancyOptions};
pub use regenerative::{gamma2_suite, wald_suite, Gamma2Options, WaldOptions};
pub use renewal::{renewal_suite, RenewalOptions};
pub use residual::{residual_suite, ResidualOptions};

/// Which side of the threshold passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    /// Passes when `statistic ≤ threshold`.
    AtMost,
    /// Passes when `statistic ≥ threshold` (p-values).
    AtLeast,
}

impl Direction {
    fn symbol(self) -> &'static str {
        match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64, direction: Direction) -> Self {
        let passed = match direction {
            Direction::AtMost => statistic <= threshold,
            Direction::AtLeast => statistic >= threshold,
        };
        Self {
            name: name.into(),
            statistic,
            threshold,
            direction,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(name, statistic, threshold, Direction::AtMost)
    }

    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(name, statistic, threshold, Direction::AtLeast)
    }

    /// A yes/no condition recorded as `statistic ∈ {0, 1} ≤ 0`.
    pub fn condition(name: impl Into<String>, holds: bool) -> Self {
        Self::at_most(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

/// A Monte Carlo estimate with its standard error when one is available.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// An analytical value an estimate is compared with.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Target {
    pub name: String,
    pub value: f64,
}

/// Outcome of one suite. `passed` holds iff every check passed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub replications: u64,
    pub estimates: Vec<Estimate>,
    pub targets: Vec<Target>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, replications: u64) -> Self {
        Self {
            suite: suite.into(),
            seed,
            replications,
            estimates: Vec::new(),
            targets: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn estimate(&mut self, name: impl Into<String>, value: f64, std_error: Option<f64>) {
        self.estimates.push(Estimate {
            name: name.into(),
            value,
            std_error,
        });
    }

    pub fn target(&mut self, name: impl Into<String>, value: f64) {
        self.targets.push(Target {
            name: name.into(),
            value,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// The check called `name`, if any.
    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn find_estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}  seed {}  replications {}  {}",
            self.suite,
            self.seed,
            self.replications,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        for e in &self.estimates {
            match e.std_error {
                Some(se) => writeln!(f, "  estimate  {:<28} {:>14.6e} ± {:.3e}", e.name, e.value, se)?,
                None => writeln!(f, "  estimate  {:<28} {:>14.6e}", e.name, e.value)?,
            }
        }
        for t in &self.targets {
            writeln!(f, "  target    {:<28} {:>14.6e}", t.name, t.value)?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "  check     {:<28} {:>14.6e} {} {:<12.6e} {}",
                c.name,
                c.statistic,
                c.direction.symbol(),
                c.threshold,
                if c.passed { "pass" } else { "FAIL" }
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note      {n}")?;
        }
        Ok(())
    }
}

/// `|estimate − target| / se`, with an exact match scoring zero.
pub(crate) fn z_score(estimate: f64, target: f64, se: f64) -> f64 {
    let diff = libm::fabs(estimate - target);
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY
    }
}

/// `true` when `values` never increases.
pub(crate) fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}
