use alloc::format;
use alloc::vec::Vec;

use super::{z_score, Check, VerificationReport};
use crate::error::{Error, Result};
use crate::exec::Runner;
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::{gamma2_series, theta, DEFAULT_SERIES_TOLERANCE};
use crate::observable::Observable;
use crate::regen::{gamma2_from_cycles, harvest_cycles, wald_from_cycles, CycleEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldOptions {
    pub v0: usize,
    pub n_cycles: usize,
    pub z_threshold: f64,
    pub seed: u64,
}

impl Default for WaldOptions {
    fn default() -> Self {
        Self {
            v0: 0,
            n_cycles: 100_000,
            z_threshold: 3.0,
            seed: 42,
        }
    }
}

/// The Wald identity for every catalog functional on one set of cycles
/// harvested at `v0`.
pub fn wald_suite<R: Runner>(
    kernel: &SemiMarkovKernel,
    options: &WaldOptions,
    runner: &R,
) -> Result<VerificationReport> {
    if options.n_cycles < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: options.n_cycles,
        });
    }
    let cycles = harvest_cycles(kernel, options.v0, options.n_cycles, options.seed, runner)?;
    let mut report = VerificationReport::new("wald", options.seed, options.n_cycles as u64);
    for f in Observable::ALL {
        let w = wald_from_cycles(kernel, f, options.v0, &cycles)?;
        report.estimate(format!("cycle_sum[f={f}]"), w.lhs, Some(w.std_error));
        report.target(format!("cycle_sum[f={f}]"), w.rhs);
        report.check(Check::at_most(
            format!("cycle_sum[f={f}] |z|"),
            z_score(w.lhs, w.rhs, w.std_error),
            options.z_threshold,
        ));
    }
    report.note(format!("reference state {}; E[tau_1] taken as 1/pi(v0)", options.v0));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma2Options {
    pub n_cycles: usize,
    pub z_threshold: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Gamma2Options {
    fn default() -> Self {
        Self {
            n_cycles: 100_000,
            z_threshold: 3.0,
            tol: DEFAULT_SERIES_TOLERANCE,
            seed: 42,
        }
    }
}

/// Seed of the cycle harvest at reference state `v0`, so that estimates
/// for different reference states are independent.
fn reference_seed(seed: u64, v0: usize) -> u64 {
    seed.wrapping_add((v0 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// The covariance-series `γ²` against the cycle estimate at every reference
/// state, and the cycle estimates against each other.
pub fn gamma2_suite<R: Runner>(
    kernel: &SemiMarkovKernel,
    options: &Gamma2Options,
    runner: &R,
) -> Result<VerificationReport> {
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let th = theta(kernel, pi);
    let series = gamma2_series(kernel, pi, th, options.tol)?;

    let mut report = VerificationReport::new("gamma2", options.seed, options.n_cycles as u64);
    report.target("gamma2_series", series);
    let mut estimates: Vec<CycleEstimate> = Vec::with_capacity(kernel.len());
    for v0 in 0..kernel.len() {
        let cycles = harvest_cycles(kernel, v0, options.n_cycles, reference_seed(options.seed, v0), runner)?;
        let e = gamma2_from_cycles(&cycles, th, pi[v0]);
        report.estimate(format!("gamma2_cycles[v0={v0}]"), e.estimate, Some(e.std_error));
        report.check(Check::at_most(
            format!("series vs cycles[v0={v0}] |z|"),
            z_score(e.estimate, series, e.std_error),
            options.z_threshold,
        ));
        estimates.push(e);
    }
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (&estimates[i], &estimates[j]);
            let se = libm::hypot(a.std_error, b.std_error);
            report.check(Check::at_most(
                format!("cycles[v0={i}] vs cycles[v0={j}] |z|"),
                z_score(a.estimate, b.estimate, se),
                options.z_threshold,
            ));
        }
    }
    Ok(report)
}
