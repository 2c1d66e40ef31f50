use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{z_score, Cdf, Check, VerificationReport};
use crate::error::{Error, Result};
use crate::exec::Runner;
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::{occupancy_limit, LimitParameters};
use crate::rng::stream;
use crate::simulate::{scaled_path_with, Initial, Sampler};
use crate::stats::{correlation, null_correlation_std_error, Moments};
use crate::verify::ks_statistic;

#[derive(Debug, Clone, PartialEq)]
pub struct CltOptions {
    pub lambda: f64,
    /// Times at which the variance is checked; `½` and `1` are always
    /// sampled as well.
    pub t_points: Vec<f64>,
    pub n_reps: usize,
    pub seed: u64,
    /// Refuse to run below `λ = 100` or `10³` replications.
    pub strict: bool,
    pub z_threshold: f64,
    pub variance_tolerance: f64,
    pub ks_p_threshold: f64,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self {
            lambda: 400.0,
            t_points: vec![0.25, 0.5, 0.75, 1.0],
            n_reps: 20_000,
            seed: 42,
            strict: true,
            z_threshold: 3.0,
            variance_tolerance: 0.05,
            ks_p_threshold: 1e-3,
        }
    }
}

/// Samples `X_λ(t)` on a grid and checks its mean and variance at each
/// time, normality of `X_λ(1)` and near-independence of the increments
/// over `[0, ½]` and `[½, 1]`.
///
/// The initial state is drawn from the occupancy law, which makes an
/// exponential-sojourn velocity process stationary. The variance target is
/// `params.diffusion · t`, so the caller's [`LimitParameters`] is the single
/// source of truth.
pub fn clt_suite<R: Runner>(
    kernel: &SemiMarkovKernel,
    params: &LimitParameters,
    options: &CltOptions,
    runner: &R,
) -> Result<VerificationReport> {
    if !(options.lambda.is_finite() && options.lambda > 0.0) {
        return Err(Error::InvalidParameter("lambda must be positive"));
    }
    if options.strict && (options.lambda < 100.0 || options.n_reps < 1000) {
        return Err(Error::InvalidParameter(
            "the CLT suite needs lambda >= 100 and at least 1000 replications",
        ));
    }
    if options.n_reps < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: options.n_reps,
        });
    }
    if options.t_points.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParameter("time points must be positive"));
    }
    if !(params.diffusion > 0.0) {
        return Err(Error::InvalidParameter("the limit variance is zero, so the Gaussian limit is degenerate"));
    }
    let structure = validate_kernel(kernel);
    let occupancy = occupancy_limit(kernel, structure.pi()?);
    let initial = Initial::Distribution(occupancy);

    let mut grid = options.t_points.clone();
    grid.extend([0.5, 1.0]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let index_of = |t: f64| grid.iter().position(|&g| g == t).expect("time on grid");

    let sampler = Sampler::new(kernel);
    let paths: Vec<Result<Vec<f64>>> = runner.map(options.n_reps, |r| {
        let mut rng = stream(options.seed, r as u64);
        let start = sampler.initial_state(&initial, &mut rng)?;
        Ok(scaled_path_with(&sampler, start, options.lambda, params.theta, &grid, rng))
    });
    let paths = paths.into_iter().collect::<Result<Vec<_>>>()?;

    let mut report = VerificationReport::new("clt", options.seed, options.n_reps as u64);
    report.target("theta", params.theta);
    report.target("diffusion", params.diffusion);

    let column = |i: usize| paths.iter().map(move |p| p[i]);
    let moments: Vec<Moments> = (0..grid.len()).map(|i| column(i).collect()).collect();

    let one = index_of(1.0);
    let m1 = &moments[one];
    report.estimate("mean[t=1]", m1.mean(), Some(m1.std_error()));
    report.check(Check::at_most(
        "mean[t=1] |z|",
        z_score(m1.mean(), 0.0, m1.std_error()),
        options.z_threshold,
    ));

    for &t in &options.t_points {
        let m = &moments[index_of(t)];
        let target = params.diffusion * t;
        report.estimate(format!("variance[t={t}]"), m.variance(), None);
        report.target(format!("variance[t={t}]"), target);
        report.check(Check::at_most(
            format!("variance[t={t}] relative error"),
            libm::fabs(m.variance() / target - 1.0),
            options.variance_tolerance,
        ));
    }

    let scale = 1.0 / libm::sqrt(params.diffusion);
    let mut standardized: Vec<f64> = column(one).map(|x| x * scale).collect();
    standardized.sort_by(f64::total_cmp);
    let ks = ks_statistic(&standardized, Cdf::StandardNormal)?;
    report.estimate("ks_d[t=1]", ks.d, None);
    report.check(Check::at_least("ks_p[t=1]", ks.p_value, options.ks_p_threshold));

    let half = index_of(0.5);
    let early: Vec<f64> = column(half).collect();
    let late: Vec<f64> = paths.iter().map(|p| p[one] - p[half]).collect();
    let r = correlation(&early, &late);
    let se = null_correlation_std_error(&early, &late);
    report.estimate("increment_correlation", r, Some(se));
    report.check(Check::at_most(
        "increment_correlation |z|",
        z_score(r, 0.0, se),
        options.z_threshold,
    ));

    report.note("initial state drawn from the occupancy law");
    report.note(format!("lambda = {}", options.lambda));
    Ok(report)
}
