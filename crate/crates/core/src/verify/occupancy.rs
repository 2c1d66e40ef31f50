use alloc::format;
use alloc::vec;

use super::{Check, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::{occupancy_limit, theta};
use crate::rng::stream;
use crate::simulate::{Initial, Sampler, Walker};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyOptions {
    pub horizon: f64,
    pub tv_tolerance: f64,
    /// Relative tolerance on the time average of `V` (a fraction of
    /// `Σ_v occ_v |v|` when `θ = 0`).
    pub mean_tolerance: f64,
    pub seed: u64,
}

impl Default for OccupancyOptions {
    fn default() -> Self {
        Self {
            horizon: 1e5,
            tv_tolerance: 0.01,
            mean_tolerance: 0.01,
            seed: 42,
        }
    }
}

/// Time spent in each state along one path over `[0, T]`, compared with
/// the occupancy limit in total variation, and `T⁻¹ ∫₀ᵀ V` compared with `θ`.
pub fn occupancy_suite(kernel: &SemiMarkovKernel, options: &OccupancyOptions) -> Result<VerificationReport> {
    if !(options.horizon.is_finite() && options.horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive"));
    }
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let occupancy = occupancy_limit(kernel, pi);
    let th = theta(kernel, pi);

    let sampler = Sampler::new(kernel);
    let mut rng = stream(options.seed, 0);
    let start = sampler.initial_state(&Initial::Distribution(pi.to_vec()), &mut rng)?;
    let mut walker = Walker::new(&sampler, start, rng);
    let end = options.horizon;
    let mut time = vec![0.0; kernel.len()];
    walker.sweep_to(end, |state, from, sojourn| time[state] += sojourn.min(end - from));

    let fractions: alloc::vec::Vec<f64> = time.iter().map(|t| t / end).collect();
    let tv = 0.5
        * fractions
            .iter()
            .zip(&occupancy)
            .map(|(a, b)| libm::fabs(a - b))
            .sum::<f64>();
    let average: f64 = fractions.iter().zip(kernel.states()).map(|(f, v)| f * v).sum();

    let mut report = VerificationReport::new("occupancy", options.seed, 1);
    for (v, (f, o)) in fractions.iter().zip(&occupancy).enumerate() {
        report.estimate(format!("fraction[state={v}]"), *f, None);
        report.target(format!("occupancy[state={v}]"), *o);
    }
    report.estimate("time_average_v", average, None);
    report.target("theta", th);
    report.check(Check::at_most("total variation", tv, options.tv_tolerance));
    let scale: f64 = occupancy.iter().zip(kernel.states()).map(|(o, v)| o * libm::fabs(*v)).sum();
    if libm::fabs(th) > 1e-12 * scale {
        report.check(Check::at_most(
            "time_average_v relative error",
            libm::fabs(average - th) / libm::fabs(th),
            options.mean_tolerance,
        ));
    } else {
        report.check(Check::at_most(
            "time_average_v absolute error",
            libm::fabs(average - th),
            options.mean_tolerance * scale,
        ));
    }
    report.note(format!("horizon = {}", options.horizon));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn deterministic_cycle_is_exact() {
        let options = OccupancyOptions {
            horizon: 1000.0,
            ..OccupancyOptions::default()
        };
        let report = occupancy_suite(&reference::deterministic_cycle(), &options).unwrap();
        assert_eq!(report.estimates[0].value, 0.5);
        assert_eq!(report.find_estimate("time_average_v").unwrap().value, 0.0);
        assert!(report.passed);
    }

    #[test]
    fn asymmetric_telegraph() {
        let report = occupancy_suite(&reference::asymmetric_telegraph(), &OccupancyOptions::default()).unwrap();
        assert!((report.targets[0].value - 2.0 / 3.0).abs() < 1e-15);
        assert!(report.passed, "{report}");
    }
}
