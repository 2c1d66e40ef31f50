use alloc::format;
use alloc::vec::Vec;

use super::{Check, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::{tv_to_stationary, validate_kernel, SemiMarkovKernel};
use crate::limits::{autocovariance, theta};

/// Relative slack for rounding when a covariance sits exactly on its bound.
const ROUNDING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingOptions {
    pub max_lag: usize,
    /// Steps `n = 1..=tv_steps` used for the total-variation slope.
    pub tv_steps: usize,
    pub slope_margin: f64,
}

impl Default for MixingOptions {
    fn default() -> Self {
        Self {
            max_lag: 30,
            tv_steps: 25,
            slope_margin: 0.05,
        }
    }
}

/// Least-squares slope of `ln d(n)` against `n`, over the `n` with `d(n) > 0`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|&(n, d)| (n, libm::log(d)))
        .collect();
    if logs.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Geometric decay of the step covariances, `|cov(k)| ≤ |cov(1)| ρ^{k−1}`,
/// and of the distance to stationarity, `ln d(n) ~ n ln ρ`.
pub fn mixing_suite(kernel: &SemiMarkovKernel, options: &MixingOptions) -> Result<VerificationReport> {
    if options.max_lag == 0 || options.tv_steps < 2 {
        return Err(Error::InvalidParameter("need at least one lag and two TV steps"));
    }
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    if !structure.is_aperiodic() {
        return Err(Error::PeriodicChain(structure.period));
    }
    let rho = structure.slem;
    let th = theta(kernel, pi);

    let mut report = VerificationReport::new("mixing", 0, 0);
    report.target("slem", rho);
    let c = libm::fabs(autocovariance(kernel, pi, th, 1)?);
    report.estimate("C = |cov(1)|", c, None);
    let mut worst: f64 = 0.0;
    for k in 1..=options.max_lag {
        let cov = libm::fabs(autocovariance(kernel, pi, th, k)?);
        let bound = c * libm::pow(rho, (k - 1) as f64);
        let excess = if cov <= bound * (1.0 + ROUNDING) {
            0.0
        } else {
            cov - bound
        };
        worst = worst.max(excess);
    }
    report.check(Check::at_most(
        format!("covariance above envelope, lags 1..={}", options.max_lag),
        worst,
        0.0,
    ));

    let p = kernel.transition();
    let points = (1..=options.tv_steps)
        .map(|n| Ok((n as f64, tv_to_stationary(p, pi, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let slope = log_slope(&points);
    report.estimate("tv log slope", slope, None);
    report.check(Check::at_most(
        "tv log slope",
        slope,
        libm::log(rho) + options.slope_margin,
    ));
    report.note("phi-mixing is checked only through covariance and total-variation decay");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn reference_kernels_pass() {
        for kernel in [reference::three_state(), reference::lazy_pair(), reference::equal_rows()] {
            let report = mixing_suite(&kernel, &MixingOptions::default()).unwrap();
            assert!(report.passed, "{report}");
        }
    }

    #[test]
    fn lazy_pair_slope_is_exact() {
        let report = mixing_suite(&reference::lazy_pair(), &MixingOptions::default()).unwrap();
        let slope = report.find_estimate("tv log slope").unwrap().value;
        assert!((slope - 0.25f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn periodic_is_rejected() {
        assert_eq!(
            mixing_suite(&reference::symmetric_telegraph(), &MixingOptions::default()).unwrap_err(),
            Error::PeriodicChain(2)
        );
    }
}
