//! Alternating renewal kernels and the (asymmetric) telegraph process.
//!
//! In an alternating renewal process the embedded chain moves
//! deterministically `v_1 → v_2 → … → v_m → v_1`, so it is periodic with
//! period `m` and `π = (1/m, …, 1/m)`. The telegraph process is the
//! two-state case with exponential sojourns.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{SemiMarkovKernel, SojournLaw};
use crate::quadrature::integrate;
use crate::simulate::Initial;
use crate::special::{ln_factorial, ln_gamma};

/// Absolute tolerance on the normalised `W` integral.
pub const PMF_QUADRATURE_TOLERANCE: f64 = 1e-12;
const PMF_MAX_SEGMENTS: usize = 4000;

/// Two-state telegraph process: velocities `v1, v2`, leaving rates
/// `lambda1, lambda2`, and `P{V(0) = v1} = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TelegraphSpec {
    pub v1: f64,
    pub v2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p: f64,
}

impl TelegraphSpec {
    pub fn new(v1: f64, v2: f64, lambda1: f64, lambda2: f64, p: f64) -> Result<Self> {
        let spec = Self {
            v1,
            v2,
            lambda1,
            lambda2,
            p,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v1.is_finite() && self.v2.is_finite()) || self.v1 == self.v2 {
            return Err(Error::InvalidParameter("telegraph velocities must be finite and distinct"));
        }
        if !(self.lambda1.is_finite() && self.lambda1 > 0.0)
            || !(self.lambda2.is_finite() && self.lambda2 > 0.0)
        {
            return Err(Error::InvalidParameter("telegraph rates must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter("initial probability must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<SemiMarkovKernel> {
        alternating_kernel(
            &[self.v1, self.v2],
            &[
                SojournLaw::exponential(self.lambda1)?,
                SojournLaw::exponential(self.lambda2)?,
            ],
        )
    }

    pub fn initial(&self) -> Initial {
        Initial::Distribution(vec![self.p, 1.0 - self.p])
    }
}

/// Kernel with `p_{v_i v_{i+1}} = 1` (indices mod `m`) and
/// `F_{v_i v_{i+1}} = laws[i]`.
pub fn alternating_kernel(values: &[f64], laws: &[SojournLaw]) -> Result<SemiMarkovKernel> {
    let m = values.len();
    if m < 2 {
        return Err(Error::TooFewStates(m));
    }
    if laws.len() != m {
        return Err(Error::InvalidParameter("one sojourn law per state is required"));
    }
    let mut transition = vec![vec![0.0; m]; m];
    let mut table = vec![vec![None; m]; m];
    for i in 0..m {
        let next = (i + 1) % m;
        transition[i][next] = 1.0;
        table[i][next] = Some(laws[i]);
    }
    SemiMarkovKernel::new(values.to_vec(), transition, table)
}

/// Closed-form limit parameters of an alternating renewal process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingLimits {
    pub theta: f64,
    pub mu: f64,
    pub gamma2: f64,
}

/// `θ = Σ v_i μ_i / Σ μ_i`, `μ = m⁻¹ Σ μ_i`, `γ² = m⁻¹ Σ σ_i² (v_i − θ)²`.
pub fn alternating_limits(
    values: &[f64],
    means: &[f64],
    variances: &[f64],
) -> Result<AlternatingLimits> {
    let m = values.len();
    if m == 0 || means.len() != m || variances.len() != m {
        return Err(Error::InvalidParameter(
            "values, means and variances must have equal non-zero length",
        ));
    }
    if means.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidParameter("sojourn means must be positive"));
    }
    if variances.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidParameter("sojourn variances must be non-negative"));
    }
    let total: f64 = means.iter().sum();
    let theta = values.iter().zip(means).map(|(v, mu)| v * mu).sum::<f64>() / total;
    let gamma2 = values
        .iter()
        .zip(variances)
        .map(|(v, s2)| s2 * (v - theta) * (v - theta))
        .sum::<f64>()
        / m as f64;
    Ok(AlternatingLimits {
        theta,
        mu: total / m as f64,
        gamma2,
    })
}

/// `P{V(t) = v1}` from the forward equation of the two-state generator.
pub fn telegraph_state_law(spec: &TelegraphSpec, t: f64) -> f64 {
    let total = spec.lambda1 + spec.lambda2;
    let amplitude = (spec.p * spec.lambda1 - (1.0 - spec.p) * spec.lambda2) / total;
    spec.lambda2 / total + amplitude * libm::exp(-total * t)
}

/// Drift `θ` and diffusion coefficient `γ²/μ` of the Brownian limit.
pub fn telegraph_limit(spec: &TelegraphSpec) -> (f64, f64) {
    let total = spec.lambda1 + spec.lambda2;
    let drift = (spec.v1 * spec.lambda2 + spec.v2 * spec.lambda1) / total;
    let dv = spec.v1 - spec.v2;
    let diffusion = 2.0 * spec.lambda1 * spec.lambda2 * dv * dv / (total * total * total);
    (drift, diffusion)
}

/// `ln` of the scale and the normalised integral in
/// `∫₀¹ u^{α−1}(1−u)^{β−1} e^{−xu} du = exp(scale) · integral`,
/// where the integral is a Beta(α, β) expectation shifted into `(0, 1]`.
fn beta_laplace(alpha: f64, beta: f64, x: f64) -> Result<(f64, f64)> {
    let ln_beta = ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta);
    let shift = (-x).max(0.0);
    let density = move |u: f64| {
        let mut ln = -ln_beta - x * u - shift;
        if alpha != 1.0 {
            ln += (alpha - 1.0) * libm::log(u);
        }
        if beta != 1.0 {
            ln += (beta - 1.0) * libm::log1p(-u);
        }
        libm::exp(ln)
    };
    let q = integrate(density, 0.0, 1.0, PMF_QUADRATURE_TOLERANCE, PMF_MAX_SEGMENTS)?;
    Ok((ln_beta + shift, q.value))
}

/// `W_{α,β}(x) = (Γ(α)Γ(β))⁻¹ ∫₀¹ u^{α−1}(1−u)^{β−1} e^{−xu} du`.
pub fn w_function(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter("W needs positive indices"));
    }
    let (ln_scale, integral) = beta_laplace(alpha, beta, x)?;
    Ok(libm::exp(ln_scale - ln_gamma(alpha) - ln_gamma(beta)) * integral)
}

/// `P{N(t) = n | V(0) = v1}` for the alternating Poisson process with
/// rates `λ1` (leaving `v1`) and `λ2` (leaving `v2`).
///
/// For `n = 2k` (`k ≥ 1`) this is `(λ1t)^k (λ2t)^k e^{−λ1t} W_{k,k+1}(t(λ2−λ1))`
/// and for `n = 2k+1` it is `(λ1t)^{k+1} (λ2t)^k e^{−λ1t} W_{k+1,k+1}(t(λ2−λ1))`.
/// The argument `t(λ2 − λ1)` is the one that reproduces the convolution of
/// the exponential sojourns; `n = 0` is `e^{−λ1t}` and equal rates reduce
/// to the Poisson law without quadrature.
pub fn alternating_poisson_pmf(lambda1: f64, lambda2: f64, t: f64, n: u64) -> Result<f64> {
    if !(lambda1.is_finite() && lambda1 > 0.0 && lambda2.is_finite() && lambda2 > 0.0) {
        return Err(Error::InvalidParameter("rates must be positive"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter("time must be positive"));
    }
    let a = lambda1 * t;
    let b = lambda2 * t;
    if n == 0 {
        return Ok(libm::exp(-a));
    }
    if lambda1 == lambda2 {
        return Ok(libm::exp(n as f64 * libm::log(a) - a - ln_factorial(n)));
    }
    let k = (n / 2) as f64;
    let (ln_prefactor, alpha, beta) = if n.is_multiple_of(2) {
        (k * libm::log(a) + k * libm::log(b) - a, k, k + 1.0)
    } else {
        ((k + 1.0) * libm::log(a) + k * libm::log(b) - a, k + 1.0, k + 1.0)
    };
    let x = t * (lambda2 - lambda1);
    let (ln_scale, integral) = beta_laplace(alpha, beta, x)?;
    let ln_w = ln_scale - ln_gamma(alpha) - ln_gamma(beta);
    Ok(libm::exp(ln_prefactor + ln_w) * integral)
}

/// PMF table for `n = 0..=n_max`.
pub fn alternating_poisson_table(lambda1: f64, lambda2: f64, t: f64, n_max: u64) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| alternating_poisson_pmf(lambda1, lambda2, t, n))
        .collect()
}
