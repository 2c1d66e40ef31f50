use alloc::format;

use super::{Check, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::theta;
use crate::observable::Observable;
use crate::rng::stream;
use crate::simulate::{Initial, Sampler};
use crate::stats::Moments;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicOptions {
    pub f: Observable,
    pub n_steps: usize,
    /// Relative tolerance, or the fraction of `E_π|f|` allowed when the
    /// target is zero.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ErgodicOptions {
    fn default() -> Self {
        Self {
            f: Observable::Time,
            n_steps: 1_000_000,
            tolerance: 0.01,
            seed: 42,
        }
    }
}

/// Compares `n⁻¹ Σ_{k≤n} f(V̂_{k−1}, ξ_k)` along one path started from `π`
/// with `E_π[f(V̂₀, S₁)]`.
pub fn ergodic_suite(kernel: &SemiMarkovKernel, options: &ErgodicOptions) -> Result<VerificationReport> {
    if options.n_steps == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let th = theta(kernel, pi);
    let f = options.f;
    let target = f.stationary_mean(kernel, pi, th);
    let scale = f.stationary_abs_mean(kernel, pi, th);

    let sampler = Sampler::new(kernel);
    let mut rng = stream(options.seed, 0);
    let mut state = sampler.initial_state(&Initial::Distribution(pi.to_vec()), &mut rng)?;
    let mut moments = Moments::new();
    for _ in 0..options.n_steps {
        let step = sampler.step(state, &mut rng);
        moments.push(f.eval(kernel.value(state), step.sojourn, th));
        state = step.state;
    }

    let mut report = VerificationReport::new("ergodic", options.seed, options.n_steps as u64);
    report.estimate(format!("mean[f={f}]"), moments.mean(), Some(moments.std_error()));
    report.target(format!("E_pi[f={f}]"), target);
    let error = libm::fabs(moments.mean() - target);
    if libm::fabs(target) > 1e-12 * scale {
        report.check(Check::at_most(
            format!("relative error[f={f}]"),
            error / libm::fabs(target),
            options.tolerance,
        ));
    } else {
        report.target(format!("E_pi[|f|={f}]"), scale);
        report.check(Check::at_most(
            format!("absolute error[f={f}]"),
            error,
            options.tolerance * scale,
        ));
    }
    report.note("path started from the invariant law of the embedded chain");
    report.note("standard error assumes independent terms and is informative only");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn constant_is_exact() {
        let options = ErgodicOptions {
            f: Observable::One,
            n_steps: 1000,
            ..ErgodicOptions::default()
        };
        let report = ergodic_suite(&reference::three_state(), &options).unwrap();
        assert_eq!(report.estimates[0].value, 1.0);
        assert!(report.passed);
    }

    #[test]
    fn symmetric_velocity_time_targets_zero() {
        let options = ErgodicOptions {
            f: Observable::VelocityTime,
            n_steps: 200_000,
            ..ErgodicOptions::default()
        };
        let report = ergodic_suite(&reference::symmetric_telegraph(), &options).unwrap();
        let check = &report.checks[0];
        assert!(check.name.starts_with("absolute"));
        assert_eq!(check.threshold, 0.01);
        assert!(report.passed, "{report}");
    }
}
