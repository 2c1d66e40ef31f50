//! Drift `θ`, mean stationary sojourn `μ`, limit variance `γ²` and the
//! occupancy law, computed from the kernel.
//!
//! With `η_k = (V̂_{k−1} − θ) ξ_k` and a stationary start,
//! `γ² = E_π[η₁²] + 2 Σ_{k≥1} E_π[η₁ η_{1+k}]`. Conditioning on `V̂₁` gives
//!
//! ```text
//! cov(0) = Σ_v π_v (v − θ)² m2_v
//! cov(k) = Σ_{v,u,w} π_v (v − θ) p_vu m_vu [P^{k−1}]_uw (w − θ) μ_w,   k ≥ 1
//! ```
//!
//! which is summed until the geometric tail bound falls below a tolerance.
//! Periodic chains make the series meaningless; cyclic permutations have a
//! closed form and any other periodic chain falls back to regenerative
//! cycles.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::{Runner, Serial};
use crate::kernel::{period, slem, validate_kernel, SemiMarkovKernel};
use crate::regen::estimate_gamma2_cycles_with;
use crate::telegraph::alternating_limits;

/// Default truncation tolerance of the covariance series.
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-10;
/// Hard cap on the number of lags summed.
pub const MAX_LAGS: usize = 1_000_000;

/// How `γ²` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LimitMethod {
    Series,
    Cycle,
    AlternatingClosedForm,
}

impl LimitMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Series => "series",
            Self::Cycle => "cycle",
            Self::AlternatingClosedForm => "alternating_closed_form",
        }
    }
}

/// Parameters of the Brownian limit `X_λ ⇒ μ^{-1/2} γ W`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LimitParameters {
    pub theta: f64,
    pub mu: f64,
    pub gamma2: f64,
    /// `γ² / μ`.
    pub diffusion: f64,
    pub method: LimitMethod,
    /// Monte Carlo standard error of `γ²`, only for [`LimitMethod::Cycle`].
    pub gamma2_std_error: Option<f64>,
}

impl LimitParameters {
    fn new(theta: f64, mu: f64, gamma2: f64, method: LimitMethod, se: Option<f64>) -> Self {
        Self {
            theta,
            mu,
            gamma2,
            diffusion: gamma2 / mu,
            method,
            gamma2_std_error: se,
        }
    }
}

/// Knobs for [`limit_parameters_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub tol: f64,
    /// Cycles harvested when the cycle method is needed.
    pub n_cycles: usize,
    pub reference_state: usize,
    pub seed: u64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SERIES_TOLERANCE,
            n_cycles: 100_000,
            reference_state: 0,
            seed: 42,
        }
    }
}

fn check_pi(kernel: &SemiMarkovKernel, pi: &[f64]) -> Result<()> {
    if pi.len() != kernel.len() {
        return Err(Error::InvalidParameter("pi length must match the number of states"));
    }
    Ok(())
}

/// `μ_v` for every state.
fn state_means(kernel: &SemiMarkovKernel) -> Vec<f64> {
    (0..kernel.len()).map(|v| kernel.mean_sojourn_from(v)).collect()
}

/// `θ = Σ π_v v μ_v / Σ π_v μ_v`.
pub fn theta(kernel: &SemiMarkovKernel, pi: &[f64]) -> f64 {
    let means = state_means(kernel);
    let num: f64 = (0..kernel.len()).map(|v| pi[v] * kernel.value(v) * means[v]).sum();
    let den: f64 = (0..kernel.len()).map(|v| pi[v] * means[v]).sum();
    num / den
}

/// `μ = E_π[S₁] = Σ π_v μ_v`.
pub fn mean_sojourn(kernel: &SemiMarkovKernel, pi: &[f64]) -> f64 {
    (0..kernel.len()).map(|v| pi[v] * kernel.mean_sojourn_from(v)).sum()
}

/// `(π_v μ_v / Σ_w π_w μ_w)_v`, the limit law of `V(t)`.
pub fn occupancy_limit(kernel: &SemiMarkovKernel, pi: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = (0..kernel.len())
        .map(|v| pi[v] * kernel.mean_sojourn_from(v))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// The vectors `a_u = Σ_v π_v (v − θ) p_vu m_vu` and `b_w = (w − θ) μ_w`
/// with `cov(k) = a · P^{k−1} b`.
fn covariance_vectors(kernel: &SemiMarkovKernel, pi: &[f64], theta: f64) -> (Vec<f64>, Vec<f64>) {
    let m = kernel.len();
    let mut a = vec![0.0; m];
    for v in 0..m {
        let weight = pi[v] * (kernel.value(v) - theta);
        for (u, slot) in a.iter_mut().enumerate() {
            *slot += weight * kernel.p(v, u) * kernel.pair_moments(v, u).0;
        }
    }
    let b = (0..m)
        .map(|w| (kernel.value(w) - theta) * kernel.mean_sojourn_from(w))
        .collect();
    (a, b)
}

fn apply(kernel: &SemiMarkovKernel, x: &[f64]) -> Vec<f64> {
    let m = kernel.len();
    (0..m)
        .map(|u| (0..m).map(|w| kernel.p(u, w) * x[w]).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E_π[η₁ η_{1+k}]` for `k ≥ 0`.
pub fn autocovariance(kernel: &SemiMarkovKernel, pi: &[f64], theta: f64, k: usize) -> Result<f64> {
    check_pi(kernel, pi)?;
    if k == 0 {
        return Ok((0..kernel.len())
            .map(|v| {
                let d = kernel.value(v) - theta;
                pi[v] * d * d * kernel.second_moment_from(v)
            })
            .sum());
    }
    let (a, mut x) = covariance_vectors(kernel, pi, theta);
    for _ in 1..k {
        x = apply(kernel, &x);
    }
    Ok(dot(&a, &x))
}

/// `γ² = cov(0) + 2 Σ_{k≥1} cov(k)`, truncated once
/// `max |cov| · ρ / (1 − ρ) < tol`, where the maximum runs over the last
/// `m` lags (a single lag can vanish by cancellation long before the tail
/// does) and `ρ` is the SLEM.
pub fn gamma2_series(kernel: &SemiMarkovKernel, pi: &[f64], theta: f64, tol: f64) -> Result<f64> {
    check_pi(kernel, pi)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter("series tolerance must be positive"));
    }
    let p = kernel.transition();
    let d = period(p);
    if d > 1 {
        return Err(Error::PeriodicChain(d));
    }
    let rho = slem(p);
    if rho >= 1.0 {
        return Err(Error::PeriodicChain(d));
    }
    let ratio = rho / (1.0 - rho);
    let window = kernel.len();
    let (a, mut x) = covariance_vectors(kernel, pi, theta);
    let mut recent: Vec<f64> = Vec::with_capacity(window);
    let mut sum = autocovariance(kernel, pi, theta, 0)?;
    for k in 1..=MAX_LAGS {
        if k > 1 {
            x = apply(kernel, &x);
        }
        let cov = dot(&a, &x);
        sum += 2.0 * cov;
        if recent.len() == window {
            recent.remove(0);
        }
        recent.push(libm::fabs(cov));
        let envelope = recent.iter().copied().fold(0.0, f64::max);
        if (k == 1 && cov == 0.0) || (k >= window && envelope * ratio < tol) {
            return Ok(sum.max(0.0));
        }
    }
    Err(Error::SeriesNotConverged(MAX_LAGS))
}

/// When `P` is a cyclic permutation, the states in cycle order starting at
/// state 0.
pub fn cyclic_order(kernel: &SemiMarkovKernel) -> Option<Vec<usize>> {
    let m = kernel.len();
    let mut order = Vec::with_capacity(m);
    let mut state = 0;
    for _ in 0..m {
        order.push(state);
        let mut next = None;
        for w in 0..m {
            let p = kernel.p(state, w);
            if p == 1.0 {
                next = Some(w);
            } else if p != 0.0 {
                return None;
            }
        }
        state = next?;
    }
    let mut seen = vec![false; m];
    for &s in &order {
        if core::mem::replace(&mut seen[s], true) {
            return None;
        }
    }
    (state == 0).then_some(order)
}

/// [`limit_parameters_with`] using default options on the calling thread.
pub fn limit_parameters(kernel: &SemiMarkovKernel) -> Result<LimitParameters> {
    limit_parameters_with(kernel, &LimitOptions::default(), &Serial)
}

/// Aperiodic chains use the covariance series, cyclic permutations the
/// alternating closed form, and other periodic chains regenerative cycles.
pub fn limit_parameters_with<R: Runner>(
    kernel: &SemiMarkovKernel,
    options: &LimitOptions,
    runner: &R,
) -> Result<LimitParameters> {
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let mu = mean_sojourn(kernel, pi);

    if let Some(order) = cyclic_order(kernel) {
        let values: Vec<f64> = order.iter().map(|&s| kernel.value(s)).collect();
        let laws: Vec<_> = order
            .iter()
            .zip(order.iter().cycle().skip(1))
            .map(|(&from, &to)| kernel.law(from, to).expect("validated kernel"))
            .collect();
        let means: Vec<f64> = laws.iter().map(|l| l.mean()).collect();
        let variances: Vec<f64> = laws.iter().map(|l| l.variance()).collect();
        let closed = alternating_limits(&values, &means, &variances)?;
        return Ok(LimitParameters::new(
            closed.theta,
            closed.mu,
            closed.gamma2,
            LimitMethod::AlternatingClosedForm,
            None,
        ));
    }

    let theta = theta(kernel, pi);
    if structure.is_aperiodic() {
        let gamma2 = gamma2_series(kernel, pi, theta, options.tol)?;
        return Ok(LimitParameters::new(theta, mu, gamma2, LimitMethod::Series, None));
    }
    let estimate = estimate_gamma2_cycles_with(
        kernel,
        options.reference_state,
        options.n_cycles,
        theta,
        options.seed,
        runner,
    )?;
    Ok(LimitParameters::new(
        theta,
        mu,
        estimate.estimate,
        LimitMethod::Cycle,
        Some(estimate.std_error),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SojournLaw;
    use crate::reference;
    use crate::rng::stream;
    use crate::simulate::{Initial, Sampler};
    use crate::stats::Moments;
    use crate::telegraph::{alternating_kernel, telegraph_limit, TelegraphSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pi_of(kernel: &SemiMarkovKernel) -> Vec<f64> {
        validate_kernel(kernel).pi.unwrap()
    }

    /// Dense fundamental-matrix evaluation of `γ²`, independent of the
    /// lag-by-lag recursion: `π · b = 0`, so `P^{k−1} b = (P − 1π)^{k−1} b`
    /// and the lag sum is `a · Z b` with `Z = (I − P + 1π)^{-1}`.
    fn fundamental_gamma2(kernel: &SemiMarkovKernel) -> f64 {
        let pi = pi_of(kernel);
        let th = theta(kernel, &pi);
        let m = kernel.len();
        let p = kernel.transition();
        let z = (nalgebra::DMatrix::identity(m, m) - p
            + nalgebra::DMatrix::from_fn(m, m, |_, c| pi[c]))
        .try_inverse()
        .unwrap();
        let (a, b) = covariance_vectors(kernel, &pi, th);
        let a = nalgebra::DVector::from_vec(a);
        let b = nalgebra::DVector::from_vec(b);
        autocovariance(kernel, &pi, th, 0).unwrap() + 2.0 * a.dot(&(z * b))
    }

    #[test]
    fn theta_examples() {
        let k = reference::symmetric_telegraph();
        assert_eq!(theta(&k, &pi_of(&k)), 0.0);
        let k = reference::asymmetric_telegraph();
        assert_abs_diff_eq!(theta(&k, &pi_of(&k)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mean_sojourn_examples() {
        let k = reference::symmetric_telegraph();
        assert_abs_diff_eq!(mean_sojourn(&k, &pi_of(&k)), 1.0, epsilon = 1e-15);
        let k = reference::asymmetric_telegraph();
        assert_abs_diff_eq!(mean_sojourn(&k, &pi_of(&k)), 0.75, epsilon = 1e-15);
        let c = SojournLaw::deterministic(2.5).unwrap();
        let k = alternating_kernel(&[1.0, 0.0, 3.0], &[c, c, c]).unwrap();
        assert_abs_diff_eq!(mean_sojourn(&k, &pi_of(&k)), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn autocovariance_examples() {
        let k = reference::equal_rows();
        let pi = pi_of(&k);
        assert_abs_diff_eq!(autocovariance(&k, &pi, 0.0, 0).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(autocovariance(&k, &pi, 0.0, 1).unwrap(), 0.0, epsilon = 1e-15);

        let k = reference::symmetric_telegraph();
        let pi = pi_of(&k);
        assert_abs_diff_eq!(autocovariance(&k, &pi, 0.0, 1).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(autocovariance(&k, &pi, 0.0, 2).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn three_state_reference_values() {
        let k = reference::three_state();
        let pi = pi_of(&k);
        let th = theta(&k, &pi);
        assert_abs_diff_eq!(th, 0.754_545_454_545_454_6, epsilon = 1e-13);
        assert_abs_diff_eq!(mean_sojourn(&k, &pi), 1.045, epsilon = 1e-13);
        assert_abs_diff_eq!(autocovariance(&k, &pi, th, 0).unwrap(), 1.539_358_190_082_644_3, epsilon = 1e-12);
        assert_abs_diff_eq!(autocovariance(&k, &pi, th, 1).unwrap(), -0.405_731_722_314_049_6, epsilon = 1e-12);
        let g = gamma2_series(&k, &pi, th, 1e-12).unwrap();
        assert_abs_diff_eq!(g, fundamental_gamma2(&k), epsilon = 1e-11);
        assert_abs_diff_eq!(g, 0.901_698_863_954_227_4, epsilon = 1e-11);
    }

    #[test]
    fn series_matches_fundamental_matrix() {
        for k in [reference::lazy_pair(), reference::equal_rows(), reference::three_state()] {
            let pi = pi_of(&k);
            let g = gamma2_series(&k, &pi, theta(&k, &pi), 1e-13).unwrap();
            assert_abs_diff_eq!(g, fundamental_gamma2(&k), epsilon = 1e-10);
        }
    }

    #[test]
    fn series_examples() {
        let k = reference::equal_rows();
        let pi = pi_of(&k);
        assert_abs_diff_eq!(gamma2_series(&k, &pi, 0.0, 1e-10).unwrap(), 2.0, epsilon = 1e-15);
        let k = reference::symmetric_telegraph();
        let pi = pi_of(&k);
        assert_eq!(gamma2_series(&k, &pi, 0.0, 1e-10).unwrap_err(), Error::PeriodicChain(2));
    }

    #[test]
    fn limit_parameters_examples() {
        let p = limit_parameters(&reference::symmetric_telegraph()).unwrap();
        assert_eq!(p.method, LimitMethod::AlternatingClosedForm);
        assert_eq!((p.theta, p.mu, p.gamma2, p.diffusion), (0.0, 1.0, 1.0, 1.0));

        let p = limit_parameters(&reference::asymmetric_telegraph()).unwrap();
        assert_abs_diff_eq!(p.theta, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.mu, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(p.gamma2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.diffusion, 4.0 / 3.0, epsilon = 1e-12);

        let p = limit_parameters(&reference::deterministic_cycle()).unwrap();
        assert_eq!(p.gamma2, 0.0);

        let p = limit_parameters(&reference::three_state()).unwrap();
        assert_eq!(p.method, LimitMethod::Series);
        assert_abs_diff_eq!(p.diffusion, 0.862_869_726_271_988, epsilon = 1e-11);
    }

    #[test]
    fn cyclic_order_detection() {
        let e = SojournLaw::exponential(1.0).unwrap();
        let k = SemiMarkovKernel::new(
            vec![1.0, 2.0, 3.0],
            vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            vec![
                vec![None, None, Some(e)],
                vec![Some(e), None, None],
                vec![None, Some(e), None],
            ],
        )
        .unwrap();
        assert_eq!(cyclic_order(&k), Some(vec![0, 2, 1]));
        assert_eq!(cyclic_order(&reference::three_state()), None);
    }

    #[test]
    fn periodic_non_cyclic_uses_cycles() {
        // bipartite chain {0} ↔ {1, 2}: period 2 but not a permutation
        let e = SojournLaw::exponential(1.0).unwrap();
        let k = SemiMarkovKernel::new(
            vec![1.0, -1.0, -2.0],
            vec![vec![0.0, 0.5, 0.5], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
            vec![
                vec![None, Some(e), Some(e)],
                vec![Some(e), None, None],
                vec![Some(e), None, None],
            ],
        )
        .unwrap();
        let options = LimitOptions {
            n_cycles: 20_000,
            ..LimitOptions::default()
        };
        let p = limit_parameters_with(&k, &options, &Serial).unwrap();
        assert_eq!(p.method, LimitMethod::Cycle);
        let se = p.gamma2_std_error.unwrap();
        assert!(se > 0.0);
        // every cycle from state 0 is 0 → {1,2} → 0, so by hand
        // θ = (1 − 1.5)/2 = −0.25 and cycle sum = 1.25 ξ₁ + (w − θ) ξ₂
        // with c = w − θ ∈ {−0.75, −1.75}:
        // E[C] = 2·1.25² + 2 E[c²] + 2·1.25 E[c] = 3.625, γ² = π₀ E[C] = 1.8125
        assert_abs_diff_eq!(p.theta, -0.25, epsilon = 1e-15);
        assert!((p.gamma2 - 1.8125).abs() < 4.0 * se, "{} ± {}", p.gamma2, se);
    }

    #[test]
    fn telegraph_display_matches_closed_form() {
        for (v1, v2, l1, l2) in [(2.0, -1.0, 1.0, 2.0), (0.3, 5.0, 0.2, 7.0), (-1.0, 1.0, 3.0, 3.0)] {
            let spec = TelegraphSpec::new(v1, v2, l1, l2, 0.5).unwrap();
            let p = limit_parameters(&spec.kernel().unwrap()).unwrap();
            let (drift, diffusion) = telegraph_limit(&spec);
            assert!((p.theta - drift).abs() < 1e-12);
            assert!((p.diffusion - diffusion).abs() < 1e-12);
        }
    }

    #[test]
    fn occupancy_examples() {
        let k = reference::symmetric_telegraph();
        assert_eq!(occupancy_limit(&k, &pi_of(&k)), vec![0.5, 0.5]);
        let k = reference::asymmetric_telegraph();
        let occ = occupancy_limit(&k, &pi_of(&k));
        assert_abs_diff_eq!(occ[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(occ[1], 1.0 / 3.0, epsilon = 1e-15);
        let c = SojournLaw::deterministic(0.7).unwrap();
        let k = SemiMarkovKernel::new(
            vec![1.0, 2.0],
            vec![vec![0.1, 0.9], vec![0.6, 0.4]],
            vec![vec![Some(c), Some(c)], vec![Some(c), Some(c)]],
        )
        .unwrap();
        let pi = pi_of(&k);
        let occ = occupancy_limit(&k, &pi);
        assert_abs_diff_eq!(occ[0], pi[0], epsilon = 1e-15);
        assert_abs_diff_eq!(occ[1], pi[1], epsilon = 1e-15);
    }

    /// Lag-k sample covariances of η over one long stationary-start run.
    #[test]
    fn autocovariance_matches_monte_carlo() {
        const N: usize = 1_000_000;
        const LAGS: usize = 4;
        for kernel in [reference::three_state(), reference::lazy_pair()] {
            let pi = pi_of(&kernel);
            let th = theta(&kernel, &pi);
            let sampler = Sampler::new(&kernel);
            let mut rng = stream(2024, 0);
            let mut state = sampler.initial_state(&Initial::Distribution(pi.clone()), &mut rng).unwrap();
            let mut eta = Vec::with_capacity(N + LAGS);
            for _ in 0..N + LAGS {
                let step = sampler.step(state, &mut rng);
                eta.push((kernel.value(state) - th) * step.sojourn);
                state = step.state;
            }
            for lag in 0..LAGS {
                let products: Moments = (0..N).map(|i| eta[i] * eta[i + lag]).collect();
                let exact = autocovariance(&kernel, &pi, th, lag).unwrap();
                // products are serially dependent; batch means give an honest SE
                let batch = 1000;
                let batches: Moments = (0..N / batch)
                    .map(|b| {
                        (b * batch..(b + 1) * batch)
                            .map(|i| eta[i] * eta[i + lag])
                            .sum::<f64>()
                            / batch as f64
                    })
                    .collect();
                let se = batches.std_error();
                assert!(
                    (products.mean() - exact).abs() < 3.0 * se,
                    "lag {lag}: {} vs {exact} (se {se})",
                    products.mean()
                );
            }
        }
    }

    fn arb_kernel() -> impl Strategy<Value = SemiMarkovKernel> {
        (2usize..5).prop_flat_map(|m| {
            (
                proptest::collection::vec(0.05f64..1.0, m * m),
                proptest::collection::vec(0.2f64..3.0, m * m),
                proptest::collection::vec(-3.0f64..3.0, m),
            )
                .prop_map(move |(weights, rates, shifts)| {
                    let mut p = vec![vec![0.0; m]; m];
                    let mut laws = vec![vec![None; m]; m];
                    for i in 0..m {
                        let total: f64 = weights[i * m..(i + 1) * m].iter().sum();
                        for j in 0..m {
                            p[i][j] = weights[i * m + j] / total;
                            laws[i][j] = Some(if (i + j) % 2 == 0 {
                                SojournLaw::exponential(rates[i * m + j]).unwrap()
                            } else {
                                SojournLaw::gamma(2.0, rates[i * m + j]).unwrap()
                            });
                        }
                    }
                    let states = (0..m).map(|i| i as f64 + 0.1 * shifts[i]).collect();
                    SemiMarkovKernel::new(states, p, laws).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn centering_identity(kernel in arb_kernel()) {
            let pi = pi_of(&kernel);
            let th = theta(&kernel, &pi);
            let residual: f64 = (0..kernel.len())
                .map(|v| pi[v] * (kernel.value(v) - th) * kernel.mean_sojourn_from(v))
                .sum();
            prop_assert!(residual.abs() < 1e-12);
        }

        #[test]
        fn parameters_are_consistent(kernel in arb_kernel()) {
            let p = limit_parameters(&kernel).unwrap();
            prop_assert!(p.mu > 0.0);
            prop_assert!(p.gamma2 >= 0.0);
            prop_assert!((p.diffusion - p.gamma2 / p.mu).abs() <= 1e-12 * p.diffusion.max(1.0));
            prop_assert!((p.gamma2 - fundamental_gamma2(&kernel)).abs() < 1e-9);
        }
    }
}
