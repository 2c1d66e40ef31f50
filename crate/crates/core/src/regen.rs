//! Regenerative structure at successive passages `τ_m` of the embedded
//! chain through a reference state `v₀`, and the cycle estimators built on
//! it.
//!
//! Passage times are `τ₁ = inf{k ≥ 1 : V̂_k = v₀}` and
//! `τ_m = inf{k > τ_{m−1} : V̂_k = v₀}`. Step `k` is the pair
//! `(V̂_{k−1}, ξ_k)`; cycle `m` holds steps `τ_m + 1 ..= τ_{m+1}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::{Runner, Serial};
use crate::kernel::{validate_kernel, SemiMarkovKernel};
use crate::limits::theta;
use crate::observable::Observable;
use crate::rng::stream;
use crate::simulate::{Sampler, Step, Trajectory};
use crate::stats::Moments;

/// Cycles harvested per random stream. Fixing the block size (rather than
/// the number of workers) keeps results independent of parallelism.
pub const CYCLE_BLOCK: usize = 1024;

/// Step `k` of a trajectory: the state `V̂_{k−1}` left and the sojourn `ξ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleStep {
    pub state: usize,
    pub sojourn: f64,
}

/// One complete cycle between consecutive passages.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    /// Index `k` of the first step (so the cycle starts at `V̂_{k−1} = v₀`).
    pub first_step: usize,
    pub steps: Vec<CycleStep>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn summary(&self, labels: &[f64]) -> CycleSummary {
        let mut summary = CycleSummary::default();
        for step in &self.steps {
            summary.push(labels[step.state], step.sojourn);
        }
        summary
    }
}

/// A trajectory cut at its passages through `v₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSet {
    pub reference_state: usize,
    /// `τ₁ < τ₂ < …`.
    pub passages: Vec<usize>,
    /// Steps `1 ..= τ₁` (every step when there is no passage).
    pub head: Vec<CycleStep>,
    pub cycles: Vec<Cycle>,
    /// Steps after the last passage.
    pub tail: Vec<CycleStep>,
    /// `V̂_n`, needed to rebuild the trajectory.
    pub final_state: usize,
}

impl CycleSet {
    /// Flags the degenerate outcome of no complete cycle.
    pub fn has_complete_cycles(&self) -> bool {
        !self.cycles.is_empty()
    }

    /// Concatenates head, cycles and tail back into a trajectory.
    pub fn reassemble(&self, labels: Vec<f64>) -> Result<Trajectory> {
        let flat: Vec<CycleStep> = self
            .head
            .iter()
            .chain(self.cycles.iter().flat_map(|c| c.steps.iter()))
            .chain(&self.tail)
            .copied()
            .collect();
        let initial = flat.first().map_or(self.final_state, |s| s.state);
        let steps = flat
            .iter()
            .enumerate()
            .map(|(i, s)| Step {
                state: flat.get(i + 1).map_or(self.final_state, |n| n.state),
                sojourn: s.sojourn,
            })
            .collect();
        Trajectory::from_steps(labels, initial, steps)
    }
}

/// Cuts `traj` at its passages through `v0`.
pub fn split_cycles(traj: &Trajectory, v0: usize) -> CycleSet {
    let mut passages = Vec::new();
    let mut head = Vec::new();
    let mut cycles: Vec<Cycle> = Vec::new();
    let mut current = Vec::new();
    let mut from = traj.initial_state();
    for (i, step) in traj.steps().iter().enumerate() {
        let k = i + 1;
        current.push(CycleStep {
            state: from,
            sojourn: step.sojourn,
        });
        if step.state == v0 {
            let steps = core::mem::take(&mut current);
            match passages.last() {
                None => head = steps,
                Some(&previous) => cycles.push(Cycle {
                    first_step: previous + 1,
                    steps,
                }),
            }
            passages.push(k);
        }
        from = step.state;
    }
    if passages.is_empty() {
        head = current;
        current = Vec::new();
    }
    CycleSet {
        reference_state: v0,
        passages,
        head,
        cycles,
        tail: current,
        final_state: from,
    }
}

/// Additive functionals of one cycle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CycleSummary {
    /// `τ_{m+1} − τ_m`.
    pub length: usize,
    /// `Σ ξ_k`.
    pub duration: f64,
    /// `Σ V̂_{k−1} ξ_k`.
    pub displacement: f64,
}

impl CycleSummary {
    #[inline]
    fn push(&mut self, velocity: f64, sojourn: f64) {
        self.length += 1;
        self.duration += sojourn;
        self.displacement += velocity * sojourn;
    }

    /// `Σ_k (V̂_{k−1} − θ) ξ_k`.
    pub fn centered_sum(&self, theta: f64) -> f64 {
        self.displacement - theta * self.duration
    }

    /// `Σ_k f(V̂_{k−1}, ξ_k)` for a catalog functional.
    pub fn observable_sum(&self, f: Observable, theta: f64) -> f64 {
        match f {
            Observable::One => self.length as f64,
            Observable::Time => self.duration,
            Observable::VelocityTime => self.displacement,
            Observable::CenteredVelocityTime => self.centered_sum(theta),
        }
    }
}

/// Simulates `n_cycles` canonical cycles from `v0`.
///
/// Cycles come in blocks of [`CYCLE_BLOCK`]; block `b` is one trajectory
/// started at `v0` on stream `(seed, b)`, so every harvested cycle is a
/// canonical cycle and no delay has to be discarded.
pub fn harvest_cycles<R: Runner>(
    kernel: &SemiMarkovKernel,
    v0: usize,
    n_cycles: usize,
    seed: u64,
    runner: &R,
) -> Result<Vec<CycleSummary>> {
    kernel.check_state(v0)?;
    if !validate_kernel(kernel).irreducible {
        return Err(Error::NotIrreducible);
    }
    let sampler = Sampler::new(kernel);
    let labels = kernel.states();
    let blocks = n_cycles.div_ceil(CYCLE_BLOCK);
    let harvested = runner.map(blocks, |b| {
        let count = CYCLE_BLOCK.min(n_cycles - b * CYCLE_BLOCK);
        let mut rng = stream(seed, b as u64);
        let mut out = Vec::with_capacity(count);
        let mut state = v0;
        for _ in 0..count {
            let mut summary = CycleSummary::default();
            loop {
                let step = sampler.step(state, &mut rng);
                summary.push(labels[state], step.sojourn);
                state = step.state;
                if state == v0 {
                    break;
                }
            }
            out.push(summary);
        }
        out
    });
    Ok(harvested.into_iter().flatten().collect())
}

/// Cycle estimate of `γ² = π_{v₀} E[(Σ_{k ≤ τ₁} η_k)²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_cycles: usize,
    pub mean_length: f64,
}

/// [`estimate_gamma2_cycles_with`] on the calling thread.
pub fn estimate_gamma2_cycles(
    kernel: &SemiMarkovKernel,
    v0: usize,
    n_cycles: usize,
    theta: f64,
    seed: u64,
) -> Result<CycleEstimate> {
    estimate_gamma2_cycles_with(kernel, v0, n_cycles, theta, seed, &Serial)
}

pub fn estimate_gamma2_cycles_with<R: Runner>(
    kernel: &SemiMarkovKernel,
    v0: usize,
    n_cycles: usize,
    theta: f64,
    seed: u64,
    runner: &R,
) -> Result<CycleEstimate> {
    if n_cycles < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_cycles,
        });
    }
    kernel.check_state(v0)?;
    let structure = validate_kernel(kernel);
    let pi_v0 = structure.pi()?[v0];
    let cycles = harvest_cycles(kernel, v0, n_cycles, seed, runner)?;
    Ok(gamma2_from_cycles(&cycles, theta, pi_v0))
}

/// `π_{v₀}·mean(C_i)` and `π_{v₀}·sd(C_i)/√n` with `C_i` the squared
/// centred cycle sums.
pub fn gamma2_from_cycles(cycles: &[CycleSummary], theta: f64, pi_v0: f64) -> CycleEstimate {
    let squares: Moments = cycles
        .iter()
        .map(|c| {
            let s = c.centered_sum(theta);
            s * s
        })
        .collect();
    let lengths: Moments = cycles.iter().map(|c| c.length as f64).collect();
    CycleEstimate {
        estimate: pi_v0 * squares.mean(),
        std_error: pi_v0 * squares.std_error(),
        n_cycles: cycles.len(),
        mean_length: lengths.mean(),
    }
}

/// Both sides of `E[Σ_{k≤τ₁} f(V̂_{k−1}, ξ_k) | V̂₀ = v₀] = E[τ₁ | v₀] E_π[f]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldCheck {
    /// Monte Carlo mean of the cycle sums.
    pub lhs: f64,
    /// `π_{v₀}⁻¹ Σ_v π_v E[f(v, ξ₁) | V̂₀ = v]`.
    pub rhs: f64,
    pub std_error: f64,
}

impl WaldCheck {
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            (self.lhs - self.rhs) / self.std_error
        } else if self.lhs == self.rhs {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn wald_check(
    kernel: &SemiMarkovKernel,
    f: Observable,
    v0: usize,
    n_cycles: usize,
    seed: u64,
) -> Result<WaldCheck> {
    wald_check_with(kernel, f, v0, n_cycles, seed, &Serial)
}

pub fn wald_check_with<R: Runner>(
    kernel: &SemiMarkovKernel,
    f: Observable,
    v0: usize,
    n_cycles: usize,
    seed: u64,
    runner: &R,
) -> Result<WaldCheck> {
    let cycles = harvest_cycles(kernel, v0, n_cycles, seed, runner)?;
    wald_from_cycles(kernel, f, v0, &cycles)
}

/// Both sides of the Wald identity from cycles already harvested at `v0`.
pub fn wald_from_cycles(
    kernel: &SemiMarkovKernel,
    f: Observable,
    v0: usize,
    cycles: &[CycleSummary],
) -> Result<WaldCheck> {
    kernel.check_state(v0)?;
    let structure = validate_kernel(kernel);
    let pi = structure.pi()?;
    let th = theta(kernel, pi);
    let rhs = f.stationary_mean(kernel, pi, th) / pi[v0];
    let sums: Moments = cycles.iter().map(|c| c.observable_sum(f, th)).collect();
    Ok(WaldCheck {
        lhs: sums.mean(),
        rhs,
        std_error: sums.std_error(),
    })
}
