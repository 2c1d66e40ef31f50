use alloc::format;
use alloc::vec::Vec;

use super::{non_increasing, Check, VerificationReport};
use crate::error::{Error, Result};
use crate::exec::Runner;
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::mean_sojourn;
use crate::rng::stream;
use crate::simulate::{check_grid, Initial, Sampler, Walker};
use crate::stats::median;

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalOptions {
    pub n_values: Vec<u64>,
    /// Times in `[0, T]` at which `N(nt)/n` is compared with `t/μ`.
    pub grid: Vec<f64>,
    pub n_reps: usize,
    pub epsilon: f64,
    /// Largest exceedance frequency accepted at the largest `n`.
    pub max_frequency: f64,
    pub seed: u64,
}

impl Default for RenewalOptions {
    fn default() -> Self {
        Self {
            n_values: alloc::vec![100, 1_000, 10_000],
            grid: (0..=100).map(|i| i as f64 / 100.0).collect(),
            n_reps: 100,
            epsilon: 0.05,
            max_frequency: 0.05,
            seed: 42,
        }
    }
}

/// `sup_{t ∈ grid} |N(nt)/n − t/μ|` along one path.
fn sup_deviation<R: rand::Rng>(sampler: &Sampler<'_>, start: usize, n: f64, mu: f64, grid: &[f64], rng: R) -> f64 {
    let mut walker = Walker::new(sampler, start, rng);
    grid.iter()
        .map(|&t| {
            walker.advance_to(n * t);
            libm::fabs(walker.count() as f64 / n - t / mu)
        })
        .fold(0.0, f64::max)
}

/// Frequency of `sup_t |N(nt)/n − t/μ| ≥ ε` over replications, for each
/// `n`; it must not increase with `n` and must be small at the largest.
/// Paths start from the invariant law of the embedded chain.
pub fn renewal_suite<R: Runner>(
    kernel: &SemiMarkovKernel,
    options: &RenewalOptions,
    runner: &R,
) -> Result<VerificationReport> {
    check_grid(&options.grid)?;
    if options.n_values.is_empty() || options.n_values.contains(&0) {
        return Err(Error::InvalidParameter("n values must be positive"));
    }
    if options.n_reps == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let mu = mean_sojourn(kernel, pi);
    let initial = Initial::Distribution(pi.to_vec());
    let sampler = Sampler::new(kernel);

    let mut report = VerificationReport::new("renewal", options.seed, options.n_reps as u64);
    report.target("mu", mu);
    let mut frequencies = Vec::with_capacity(options.n_values.len());
    for (j, &n) in options.n_values.iter().enumerate() {
        let sups: Vec<Result<f64>> = runner.map(options.n_reps, |r| {
            let mut rng = stream(options.seed, ((j as u64) << 32) | r as u64);
            let start = sampler.initial_state(&initial, &mut rng)?;
            Ok(sup_deviation(&sampler, start, n as f64, mu, &options.grid, rng))
        });
        let sups = sups.into_iter().collect::<Result<Vec<_>>>()?;
        let exceed = sups.iter().filter(|&&s| s >= options.epsilon).count();
        let frequency = exceed as f64 / options.n_reps as f64;
        report.estimate(format!("exceedance[n={n}]"), frequency, None);
        report.estimate(format!("median_sup[n={n}]"), median(&sups), None);
        frequencies.push(frequency);
    }
    let last = *options.n_values.last().expect("non-empty");
    report.check(Check::at_most(
        format!("exceedance[n={last}]"),
        *frequencies.last().expect("non-empty"),
        options.max_frequency,
    ));
    report.check(Check::condition(
        "exceedance non-increasing in n",
        non_increasing(&frequencies),
    ));
    report.note(format!("epsilon = {}", options.epsilon));
    Ok(report)
}
