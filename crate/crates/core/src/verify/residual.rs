use alloc::format;
use alloc::vec::Vec;

use super::{non_increasing, Check, VerificationReport};
use crate::error::{Error, Result};
use crate::exec::Runner;
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::rng::stream;
use crate::simulate::{Initial, Sampler, Walker};
use crate::stats::median;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualOptions {
    pub n_values: Vec<u64>,
    pub n_reps: usize,
    /// `T` in `sup_{t ∈ [0, T]} R(nt)`.
    pub horizon: f64,
    /// Bound on the median statistic at the largest `n`.
    pub threshold: f64,
    pub seed: u64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            n_values: alloc::vec![100, 1_000, 10_000],
            n_reps: 100,
            horizon: 1.0,
            threshold: 0.1,
            seed: 42,
        }
    }
}

/// Median over replications of `sup_{t ∈ [0, T]} R(nt) / √n`, taken over
/// the continuum: the longest sojourn completed by `nT` or the running age
/// at `nT`. Paths start from the invariant law of the embedded chain.
pub fn residual_suite<R: Runner>(
    kernel: &SemiMarkovKernel,
    options: &ResidualOptions,
    runner: &R,
) -> Result<VerificationReport> {
    if options.n_values.is_empty() || options.n_values.contains(&0) {
        return Err(Error::InvalidParameter("n values must be positive"));
    }
    if !(options.horizon.is_finite() && options.horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive"));
    }
    if options.n_reps == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let structure = validate_kernel(kernel);
    let initial = Initial::Distribution(structure.pi()?.to_vec());
    let sampler = Sampler::new(kernel);

    let mut report = VerificationReport::new("residual", options.seed, options.n_reps as u64);
    let mut medians = Vec::with_capacity(options.n_values.len());
    for (j, &n) in options.n_values.iter().enumerate() {
        let end = n as f64 * options.horizon;
        let stats: Vec<Result<f64>> = runner.map(options.n_reps, |r| {
            let mut rng = stream(options.seed, ((j as u64) << 32) | r as u64);
            let start = sampler.initial_state(&initial, &mut rng)?;
            let mut walker = Walker::new(&sampler, start, rng);
            let mut sup: f64 = 0.0;
            walker.sweep_to(end, |_, from, sojourn| sup = sup.max(sojourn.min(end - from)));
            Ok(sup / libm::sqrt(n as f64))
        });
        let stats = stats.into_iter().collect::<Result<Vec<_>>>()?;
        let m = median(&stats);
        report.estimate(format!("median_sup_residual[n={n}]"), m, None);
        medians.push(m);
    }
    let last = *options.n_values.last().expect("non-empty");
    report.check(Check::at_most(
        format!("median_sup_residual[n={last}]"),
        *medians.last().expect("non-empty"),
        options.threshold,
    ));
    report.check(Check::condition("median non-increasing in n", non_increasing(&medians)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;
    use crate::reference;

    #[test]
    fn deterministic_statistic_is_inverse_root() {
        let options = ResidualOptions {
            n_reps: 3,
            ..ResidualOptions::default()
        };
        let report = residual_suite(&reference::deterministic_cycle(), &options, &Serial).unwrap();
        for (e, n) in report.estimates.iter().zip([100.0f64, 1000.0, 10_000.0]) {
            assert!((e.value - 1.0 / n.sqrt()).abs() < 1e-15, "{e:?}");
        }
        assert!(report.passed);
    }
}
