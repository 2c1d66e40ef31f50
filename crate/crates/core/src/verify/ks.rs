//! One-sample Kolmogorov–Smirnov statistic.

use crate::error::{Error, Result};
use crate::special::{kolmogorov_survival, normal_cdf};

/// Smallest sample accepted by [`ks_statistic`].
pub const KS_MIN_SAMPLES: usize = 8;

/// Hypothesised continuous distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cdf {
    StandardNormal,
    Normal { mean: f64, sd: f64 },
    Uniform { low: f64, high: f64 },
}

impl Cdf {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::StandardNormal => normal_cdf(x),
            Self::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Self::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::StandardNormal => Ok(()),
            Self::Normal { mean, sd } if mean.is_finite() && sd.is_finite() && sd > 0.0 => Ok(()),
            Self::Uniform { low, high } if low.is_finite() && high.is_finite() && low < high => Ok(()),
            _ => Err(Error::InvalidParameter("invalid reference distribution")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub d: f64,
    /// Asymptotic `P{√n D_n > √n d}` from the Kolmogorov series.
    pub p_value: f64,
}

/// `D = max_i max(i/n − F(x_i), F(x_i) − (i−1)/n)` over sorted `samples`.
pub fn ks_statistic(samples: &[f64], cdf: Cdf) -> Result<KsResult> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: KS_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    ks_statistic_ungated(samples, cdf)
}

/// [`ks_statistic`] without the minimum-sample gate.
pub fn ks_statistic_ungated(samples: &[f64], cdf: Cdf) -> Result<KsResult> {
    cdf.validate()?;
    if samples.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if samples.iter().any(|x| x.is_nan()) || samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("samples must be sorted and free of NaN"));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf.eval(x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    Ok(KsResult {
        d,
        p_value: kolmogorov_survival(libm::sqrt(n) * d),
    })
}
