//! Special functions needed by the tests and the telegraph formulas.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Number of terms kept in either Kolmogorov series.
const KOLMOGOROV_TERMS: usize = 100;

/// Survival function `P{K > x}` of the Kolmogorov distribution.
///
/// Uses the alternating series `2 Σ (−1)^{j−1} e^{−2j²x²}` for `x ≥ 1` and
/// the equivalent theta-function form for `x < 1`, where the alternating
/// series converges too slowly; both truncated at 100 terms.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    let p = if x >= 1.0 {
        let mut sum = 0.0;
        for j in 1..=KOLMOGOROV_TERMS {
            let j = j as f64;
            let term = libm::exp(-2.0 * j * j * x * x);
            sum += if j as usize % 2 == 1 { term } else { -term };
        }
        2.0 * sum
    } else {
        let mut sum = 0.0;
        for j in 1..=KOLMOGOROV_TERMS {
            let odd = (2 * j - 1) as f64;
            sum += libm::exp(-odd * odd * PI * PI / (8.0 * x * x));
        }
        1.0 - libm::sqrt(2.0 * PI) / x * sum
    };
    p.clamp(0.0, 1.0)
}
