//! Exact sampling of Markov renewal trajectories and the processes built on
//! them: the counting process `N(t)`, the semi-Markov process
//! `V(t) = V̂_{N(t)}`, its integral `X(t)`, the residual life `R(t)` and the
//! scaled integral `X_λ(t) = λ^{-1/2}(X(λt) − θλt)`.
//!
//! Each step draws the next state from row `V̂_k` of `P` first and then the
//! sojourn from `F_{V̂_k V̂_{k+1}}`, so sojourns depend on both endpoints.
//! `V` is right-continuous: at `t = S_k` it already holds `V̂_k`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::kernel::{SemiMarkovKernel, SojournLaw};
use crate::rng::stream;

/// Initial condition of the embedded chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    State(usize),
    Distribution(Vec<f64>),
}

/// How far to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Exactly this many transitions.
    Steps(usize),
    /// Until the first arrival strictly after this time, so that `N`, `V`
    /// and `R` (and the next sojourn) are defined on the whole of `[0, T]`.
    UntilTime(f64),
}

/// One transition: the state entered and the sojourn `ξ_k` that preceded it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub sojourn: f64,
}

#[derive(Debug, Clone)]
enum PreparedLaw {
    Exponential { rate: f64 },
    Gamma(rand_distr::Gamma<f64>),
    Uniform { low: f64, width: f64 },
    Deterministic(f64),
}

impl PreparedLaw {
    fn new(law: &SojournLaw) -> Self {
        match *law {
            SojournLaw::Exponential { rate } => Self::Exponential { rate },
            SojournLaw::Gamma { shape, rate } => Self::Gamma(
                rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated gamma parameters"),
            ),
            SojournLaw::Uniform { low, high } => Self::Uniform {
                low,
                width: high - low,
            },
            SojournLaw::Deterministic { value } => Self::Deterministic(value),
        }
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = match self {
                Self::Exponential { rate } => {
                    let e: f64 = Exp1.sample(rng);
                    e / rate
                }
                Self::Gamma(g) => g.sample(rng),
                Self::Uniform { low, width } => low + width * rng.random::<f64>(),
                Self::Deterministic(c) => return *c,
            };
            // sojourns are a.s. positive; a zero draw is a null event
            if x > 0.0 {
                return x;
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Choice {
    cumulative: f64,
    target: usize,
    law: PreparedLaw,
}

/// Pre-processed kernel for fast repeated sampling. Immutable and `Sync`,
/// so one sampler serves any number of concurrent replications.
#[derive(Debug, Clone)]
pub struct Sampler<'k> {
    kernel: &'k SemiMarkovKernel,
    rows: Vec<Vec<Choice>>,
}

impl<'k> Sampler<'k> {
    pub fn new(kernel: &'k SemiMarkovKernel) -> Self {
        let m = kernel.len();
        let rows = (0..m)
            .map(|from| {
                let mut acc = 0.0;
                let mut row: Vec<Choice> = (0..m)
                    .filter(|&to| kernel.p(from, to) > 0.0)
                    .map(|to| {
                        acc += kernel.p(from, to);
                        Choice {
                            cumulative: acc,
                            target: to,
                            law: PreparedLaw::new(kernel.law(from, to).expect("validated kernel")),
                        }
                    })
                    .collect();
                if let Some(last) = row.last_mut() {
                    last.cumulative = f64::INFINITY;
                }
                row
            })
            .collect();
        Self { kernel, rows }
    }

    pub fn kernel(&self) -> &'k SemiMarkovKernel {
        self.kernel
    }

    /// Draws `(V̂_{k+1}, ξ_{k+1})` given `V̂_k = from`.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> Step {
        let row = &self.rows[from];
        let u: f64 = rng.random();
        let choice = row
            .iter()
            .find(|c| u < c.cumulative)
            .unwrap_or_else(|| row.last().expect("non-empty row"));
        Step {
            state: choice.target,
            sojourn: choice.law.sample(rng),
        }
    }

    pub fn initial_state<R: Rng + ?Sized>(&self, initial: &Initial, rng: &mut R) -> Result<usize> {
        match initial {
            Initial::State(s) => {
                self.kernel.check_state(*s)?;
                Ok(*s)
            }
            Initial::Distribution(weights) => {
                if weights.len() != self.kernel.len()
                    || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
                {
                    return Err(Error::InvalidParameter(
                        "initial distribution must be a non-negative vector over the states",
                    ));
                }
                let total: f64 = weights.iter().sum();
                if total <= 0.0 {
                    return Err(Error::InvalidParameter("initial distribution has zero mass"));
                }
                Ok(sample_index(weights, total, rng))
            }
        }
    }

    /// Samples a trajectory from an already chosen initial state.
    pub fn trajectory<R: Rng + ?Sized>(&self, initial_state: usize, mode: Mode, rng: &mut R) -> Trajectory {
        let mut steps = Vec::new();
        let mut state = initial_state;
        let mut time = 0.0;
        let horizon = match mode {
            Mode::Steps(n) => {
                steps.reserve(n);
                for _ in 0..n {
                    let step = self.step(state, rng);
                    state = step.state;
                    time += step.sojourn;
                    steps.push(step);
                }
                time
            }
            Mode::UntilTime(t) => {
                while time <= t {
                    let step = self.step(state, rng);
                    state = step.state;
                    time += step.sojourn;
                    steps.push(step);
                }
                t
            }
        };
        Trajectory::assemble(self.kernel.states().to_vec(), initial_state, steps, horizon)
    }
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            acc += w;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// A realised Markov renewal path `(V̂_k, S_k)` with its velocity labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    labels: Vec<f64>,
    initial_state: usize,
    steps: Vec<Step>,
    arrivals: Vec<f64>,
    horizon: f64,
}

impl Trajectory {
    /// Builds a trajectory from explicit steps; the horizon is the last
    /// arrival.
    pub fn from_steps(labels: Vec<f64>, initial_state: usize, steps: Vec<Step>) -> Result<Self> {
        if initial_state >= labels.len() {
            return Err(Error::StateOutOfRange(initial_state));
        }
        for step in &steps {
            if step.state >= labels.len() {
                return Err(Error::StateOutOfRange(step.state));
            }
            if !(step.sojourn.is_finite() && step.sojourn > 0.0) {
                return Err(Error::InvalidParameter("sojourns must be positive"));
            }
        }
        let horizon = steps.iter().map(|s| s.sojourn).sum();
        Ok(Self::assemble(labels, initial_state, steps, horizon))
    }

    fn assemble(labels: Vec<f64>, initial_state: usize, steps: Vec<Step>, horizon: f64) -> Self {
        let mut arrivals = Vec::with_capacity(steps.len() + 1);
        let mut time = 0.0;
        arrivals.push(time);
        for step in &steps {
            time += step.sojourn;
            arrivals.push(time);
        }
        Self {
            labels,
            initial_state,
            steps,
            arrivals,
            horizon,
        }
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `S_0 = 0, S_1, …, S_n`.
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `V̂_k` for `k = 0..=n`.
    pub fn state(&self, k: usize) -> usize {
        if k == 0 {
            self.initial_state
        } else {
            self.steps[k - 1].state
        }
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        core::iter::once(self.initial_state).chain(self.steps.iter().map(|s| s.state))
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter("time must be non-negative"));
        }
        if t > self.horizon {
            return Err(Error::HorizonExceeded {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn count_unchecked(&self, t: f64) -> usize {
        self.arrivals.partition_point(|&s| s <= t) - 1
    }

    /// `N(t) = max{k : S_k ≤ t}`.
    pub fn counting(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.count_unchecked(t))
    }

    /// `V(t) = V̂_{N(t)}`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.labels[self.state(self.counting(t)?)])
    }

    /// `R(t) = t − S_{N(t)}`.
    pub fn residual_life(&self, t: f64) -> Result<f64> {
        let n = self.counting(t)?;
        Ok(t - self.arrivals[n])
    }

    /// `sup_{s ∈ [0, t]} R(s)`: the longest sojourn completed by `t`, or the
    /// running age at `t` if that is longer.
    pub fn sup_residual(&self, t: f64) -> Result<f64> {
        let n = self.counting(t)?;
        let completed = self.steps[..n].iter().map(|s| s.sojourn).fold(0.0, f64::max);
        Ok(completed.max(t - self.arrivals[n]))
    }

    /// `X(t)` on a non-decreasing grid, by one forward sweep.
    pub fn integral_path(&self, grid: &[f64]) -> Result<Vec<f64>> {
        check_grid(grid)?;
        if let Some(&last) = grid.last() {
            self.check_time(last)?;
        }
        let mut out = Vec::with_capacity(grid.len());
        let mut k = 0;
        let mut position = 0.0;
        for &t in grid {
            while k < self.steps.len() && self.arrivals[k + 1] <= t {
                position += self.labels[self.state(k)] * self.steps[k].sojourn;
                k += 1;
            }
            out.push(position + self.labels[self.state(k)] * (t - self.arrivals[k]));
        }
        Ok(out)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter("grid points must be finite and non-negative"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("grid must be non-decreasing"));
    }
    Ok(())
}

/// Samples a trajectory on stream `(seed, 0)`.
pub fn sample_markov_renewal(
    kernel: &SemiMarkovKernel,
    initial: &Initial,
    mode: Mode,
    seed: u64,
) -> Result<Trajectory> {
    match mode {
        Mode::UntilTime(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(Error::InvalidParameter("time horizon must be finite and non-negative"))
        }
        _ => {}
    }
    let sampler = Sampler::new(kernel);
    let mut rng = stream(seed, 0);
    let start = sampler.initial_state(initial, &mut rng)?;
    Ok(sampler.trajectory(start, mode, &mut rng))
}

/// `N(t)`.
pub fn counting(traj: &Trajectory, t: f64) -> Result<usize> {
    traj.counting(t)
}

/// `V(t)`.
pub fn semi_markov_value(traj: &Trajectory, t: f64) -> Result<f64> {
    traj.value_at(t)
}

/// `X(t)` on a grid.
pub fn integral_path(traj: &Trajectory, grid: &[f64]) -> Result<Vec<f64>> {
    traj.integral_path(grid)
}

/// `R(t)`.
pub fn residual_life(traj: &Trajectory, t: f64) -> Result<f64> {
    traj.residual_life(t)
}

/// Streams a path forward in time without storing it.
///
/// Draws are made in exactly the same order as [`Sampler::trajectory`] in
/// [`Mode::UntilTime`], so both see the same path for the same generator.
pub struct Walker<'s, 'k, R> {
    sampler: &'s Sampler<'k>,
    rng: R,
    state: usize,
    pending: Step,
    arrival: f64,
    position: f64,
    count: usize,
}

impl<'s, 'k, R: Rng> Walker<'s, 'k, R> {
    pub fn new(sampler: &'s Sampler<'k>, initial_state: usize, mut rng: R) -> Self {
        let pending = sampler.step(initial_state, &mut rng);
        Self {
            sampler,
            rng,
            state: initial_state,
            pending,
            arrival: 0.0,
            position: 0.0,
            count: 0,
        }
    }

    /// Moves the walker to time `t` (which must not decrease between calls).
    #[inline]
    pub fn advance_to(&mut self, t: f64) {
        let labels = self.sampler.kernel().states();
        while self.arrival + self.pending.sojourn <= t {
            self.position += labels[self.state] * self.pending.sojourn;
            self.arrival += self.pending.sojourn;
            self.state = self.pending.state;
            self.count += 1;
            self.pending = self.sampler.step(self.state, &mut self.rng);
        }
    }

    /// Visits every sojourn interval that starts before `t`, calling
    /// `visit(state, start, sojourn)`, and leaves the walker at `t`.
    pub fn sweep_to<F: FnMut(usize, f64, f64)>(&mut self, t: f64, mut visit: F) {
        let labels = self.sampler.kernel().states();
        while self.arrival + self.pending.sojourn <= t {
            visit(self.state, self.arrival, self.pending.sojourn);
            self.position += labels[self.state] * self.pending.sojourn;
            self.arrival += self.pending.sojourn;
            self.state = self.pending.state;
            self.count += 1;
            self.pending = self.sampler.step(self.state, &mut self.rng);
        }
        visit(self.state, self.arrival, self.pending.sojourn);
    }

    /// `N` at the current time.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Last arrival `S_{N(t)}`.
    pub fn last_arrival(&self) -> f64 {
        self.arrival
    }

    /// `X(t)` for a `t` not before the last `advance_to` target and not past
    /// the pending arrival.
    #[inline]
    pub fn position_at(&self, t: f64) -> f64 {
        self.position + self.sampler.kernel().value(self.state) * (t - self.arrival)
    }
}

/// `X_λ(t) = λ^{-1/2}(X(λt) − θλt)` on `grid` for a path drawn with `rng`.
pub fn scaled_path_with<R: Rng>(
    sampler: &Sampler<'_>,
    initial_state: usize,
    lambda: f64,
    theta: f64,
    grid: &[f64],
    rng: R,
) -> Vec<f64> {
    let scale = 1.0 / libm::sqrt(lambda);
    let mut walker = Walker::new(sampler, initial_state, rng);
    grid.iter()
        .map(|&t| {
            let s = lambda * t;
            walker.advance_to(s);
            scale * (walker.position_at(s) - theta * s)
        })
        .collect()
}

/// `X_λ` on `grid` from a fresh trajectory on stream `(seed, 0)`.
pub fn scaled_integral_path(
    kernel: &SemiMarkovKernel,
    lambda: f64,
    theta: f64,
    grid: &[f64],
    initial: &Initial,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter("lambda must be positive"));
    }
    check_grid(grid)?;
    let sampler = Sampler::new(kernel);
    let mut rng = stream(seed, 0);
    let start = sampler.initial_state(initial, &mut rng)?;
    Ok(scaled_path_with(&sampler, start, lambda, theta, grid, rng))
}
