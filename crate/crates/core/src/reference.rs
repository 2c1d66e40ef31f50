//! Reference kernels used throughout the tests, the examples and the
//! acceptance suite.

use alloc::vec;

use crate::kernel::{SemiMarkovKernel, SojournLaw};
use crate::telegraph::alternating_kernel;

fn exp(rate: f64) -> Option<SojournLaw> {
    Some(SojournLaw::Exponential { rate })
}

/// Velocities ±1 alternating after Exp(1) sojourns.
pub fn symmetric_telegraph() -> SemiMarkovKernel {
    alternating_kernel(&[1.0, -1.0], &[exp(1.0).unwrap(), exp(1.0).unwrap()])
        .expect("valid reference kernel")
}

/// Velocities (2, −1) with switching rates (1, 2).
pub fn asymmetric_telegraph() -> SemiMarkovKernel {
    alternating_kernel(&[2.0, -1.0], &[exp(1.0).unwrap(), exp(2.0).unwrap()])
        .expect("valid reference kernel")
}

/// Velocities ±1 alternating after unit deterministic sojourns.
pub fn deterministic_cycle() -> SemiMarkovKernel {
    let one = SojournLaw::Deterministic { value: 1.0 };
    alternating_kernel(&[1.0, -1.0], &[one, one]).expect("valid reference kernel")
}

/// Velocities ±1, i.i.d. uniform next state, Exp(1) sojourns.
pub fn equal_rows() -> SemiMarkovKernel {
    SemiMarkovKernel::new(
        vec![1.0, -1.0],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![vec![exp(1.0), exp(1.0)], vec![exp(1.0), exp(1.0)]],
    )
    .expect("valid reference kernel")
}

/// Aperiodic two-state chain `[[0.5, 0.5], [0.25, 0.75]]` with a different
/// sojourn family on every transition.
pub fn lazy_pair() -> SemiMarkovKernel {
    SemiMarkovKernel::new(
        vec![1.0, -2.0],
        vec![vec![0.5, 0.5], vec![0.25, 0.75]],
        vec![
            vec![exp(1.0), Some(SojournLaw::Uniform { low: 0.0, high: 2.0 })],
            vec![
                Some(SojournLaw::Gamma { shape: 2.0, rate: 2.0 }),
                Some(SojournLaw::Deterministic { value: 0.5 }),
            ],
        ],
    )
    .expect("valid reference kernel")
}

/// Aperiodic three-state chain with all four sojourn families, sojourn laws
/// depending on both endpoints. Transition eigenvalues are (1, 0, −0.3) and
/// `π = (0.3, 0.3, 0.4)`.
pub fn three_state() -> SemiMarkovKernel {
    use SojournLaw::*;
    SemiMarkovKernel::new(
        vec![2.0, -0.5, 1.0],
        vec![
            vec![0.2, 0.5, 0.3],
            vec![0.4, 0.1, 0.5],
            vec![0.3, 0.3, 0.4],
        ],
        vec![
            vec![
                exp(2.0),
                Some(Gamma { shape: 2.0, rate: 2.0 }),
                Some(Uniform { low: 0.5, high: 1.5 }),
            ],
            vec![
                Some(Deterministic { value: 0.8 }),
                exp(1.0),
                Some(Gamma { shape: 3.0, rate: 2.0 }),
            ],
            vec![
                Some(Uniform { low: 0.0, high: 2.0 }),
                exp(0.5),
                Some(Deterministic { value: 0.4 }),
            ],
        ],
    )
    .expect("valid reference kernel")
}
