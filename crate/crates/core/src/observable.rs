//! The closed catalog of step functionals `f(v, x)` of a displacement with
//! velocity `v` and duration `x`.

use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::kernel::SemiMarkovKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Observable {
    /// `f = 1`
    One,
    /// `f = x`
    Time,
    /// `f = v·x`
    VelocityTime,
    /// `f = (v − θ)·x`
    CenteredVelocityTime,
}

impl Observable {
    pub const ALL: [Observable; 4] = [
        Self::One,
        Self::Time,
        Self::VelocityTime,
        Self::CenteredVelocityTime,
    ];

    #[inline]
    pub fn eval(self, velocity: f64, duration: f64, theta: f64) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Time => duration,
            Self::VelocityTime => velocity * duration,
            Self::CenteredVelocityTime => (velocity - theta) * duration,
        }
    }

    /// `E[f(v, ξ₁) | V̂₀ = state]`.
    pub fn conditional_mean(self, kernel: &SemiMarkovKernel, state: usize, theta: f64) -> f64 {
        let v = kernel.value(state);
        let mu = kernel.mean_sojourn_from(state);
        match self {
            Self::One => 1.0,
            Self::Time => mu,
            Self::VelocityTime => v * mu,
            Self::CenteredVelocityTime => (v - theta) * mu,
        }
    }

    /// `E[|f(v, ξ₁)| | V̂₀ = state]`.
    pub fn conditional_abs_mean(self, kernel: &SemiMarkovKernel, state: usize, theta: f64) -> f64 {
        let v = kernel.value(state);
        let mu = kernel.mean_sojourn_from(state);
        match self {
            Self::One => 1.0,
            Self::Time => mu,
            Self::VelocityTime => libm::fabs(v) * mu,
            Self::CenteredVelocityTime => libm::fabs(v - theta) * mu,
        }
    }

    /// `E_π[f(V̂₀, S₁)]`.
    pub fn stationary_mean(self, kernel: &SemiMarkovKernel, pi: &[f64], theta: f64) -> f64 {
        pi.iter()
            .enumerate()
            .map(|(v, p)| p * self.conditional_mean(kernel, v, theta))
            .sum()
    }

    /// `E_π[|f(V̂₀, S₁)|]`, the scale used when the target mean is zero.
    pub fn stationary_abs_mean(self, kernel: &SemiMarkovKernel, pi: &[f64], theta: f64) -> f64 {
        pi.iter()
            .enumerate()
            .map(|(v, p)| p * self.conditional_abs_mean(kernel, v, theta))
            .sum()
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Time => "x",
            Self::VelocityTime => "v*x",
            Self::CenteredVelocityTime => "(v-theta)*x",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" | "one" => Ok(Self::One),
            "x" | "time" => Ok(Self::Time),
            "v*x" | "vx" | "velocity_time" => Ok(Self::VelocityTime),
            "(v-theta)*x" | "centered" | "centered_velocity_time" => {
                Ok(Self::CenteredVelocityTime)
            }
            _ => Err(Error::InvalidParameter("unknown observable tag")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for f in Observable::ALL {
            assert_eq!(f.tag().parse::<Observable>().unwrap(), f);
        }
        assert!("x^2".parse::<Observable>().is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(Observable::One.eval(3.0, 2.0, 1.0), 1.0);
        assert_eq!(Observable::Time.eval(3.0, 2.0, 1.0), 2.0);
        assert_eq!(Observable::VelocityTime.eval(3.0, 2.0, 1.0), 6.0);
        assert_eq!(Observable::CenteredVelocityTime.eval(3.0, 2.0, 1.0), 4.0);
    }
}
