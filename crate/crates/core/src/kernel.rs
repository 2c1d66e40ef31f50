//! Semi-Markov kernel data model and the structure of its embedded chain.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Row sums may deviate from one by at most this much before a matrix is
/// rejected; accepted rows are renormalised exactly.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Conditional sojourn-time law `F_vw` of a transition.
///
/// Only closed-form families with finite second moment are supported, so the
/// moments used by the limit formulas are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "family", rename_all = "snake_case")
)]
pub enum SojournLaw {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { low: f64, high: f64 },
    Deterministic { value: f64 },
}

impl SojournLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::Gamma { shape, rate }.validated()
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        Self::Uniform { low, high }.validated()
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        Self::Deterministic { value }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match *self {
            Self::Exponential { rate } if !positive(rate) => {
                Err(Error::InvalidSojournLaw("exponential rate must be positive"))
            }
            Self::Gamma { shape, rate } if !positive(shape) || !positive(rate) => Err(
                Error::InvalidSojournLaw("gamma shape and rate must be positive"),
            ),
            Self::Uniform { low, high } if !(low.is_finite() && high.is_finite()) => {
                Err(Error::InvalidSojournLaw("uniform bounds must be finite"))
            }
            Self::Uniform { low, high } if low < 0.0 || high <= low => {
                Err(Error::InvalidSojournLaw("uniform law needs 0 <= low < high"))
            }
            Self::Deterministic { value } if !positive(value) => Err(
                Error::InvalidSojournLaw("deterministic sojourn must be positive"),
            ),
            _ => Ok(()),
        }
    }

    /// First and second raw moments `(E[ξ], E[ξ²])`.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            Self::Exponential { rate } => (1.0 / rate, 2.0 / (rate * rate)),
            Self::Gamma { shape, rate } => (shape / rate, shape * (shape + 1.0) / (rate * rate)),
            Self::Uniform { low, high } => (
                0.5 * (low + high),
                (low * low + low * high + high * high) / 3.0,
            ),
            Self::Deterministic { value } => (value, value * value),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    pub fn variance(&self) -> f64 {
        let (m1, m2) = self.moments();
        // exact zero for point masses
        match self {
            Self::Deterministic { .. } => 0.0,
            _ => m2 - m1 * m1,
        }
    }
}

/// Exact first and second raw moments of a sojourn law.
pub fn sojourn_moments(law: &SojournLaw) -> (f64, f64) {
    law.moments()
}

/// A finite semi-Markov kernel: velocity labels, embedded transition matrix
/// and one sojourn law per allowed transition.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMarkovKernel {
    states: Vec<f64>,
    transition: DMatrix<f64>,
    laws: Vec<Option<SojournLaw>>,
}

impl SemiMarkovKernel {
    /// Builds and validates a kernel.
    ///
    /// `laws[v][w]` must be present exactly where `transition[v][w] > 0`.
    pub fn new(
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        laws: Vec<Vec<Option<SojournLaw>>>,
    ) -> Result<Self> {
        let m = states.len();
        if transition.len() != m || transition.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidStochasticMatrix(
                "transition matrix must be square with one row per state",
            ));
        }
        let flat: Vec<f64> = transition.into_iter().flatten().collect();
        Self::from_matrix(states, DMatrix::from_row_slice(m, m, &flat), laws)
    }

    pub fn from_matrix(
        states: Vec<f64>,
        transition: DMatrix<f64>,
        laws: Vec<Vec<Option<SojournLaw>>>,
    ) -> Result<Self> {
        let m = states.len();
        if m < 2 {
            return Err(Error::TooFewStates(m));
        }
        if states.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("state values must be finite"));
        }
        for i in 0..m {
            for j in i + 1..m {
                if states[i] == states[j] {
                    return Err(Error::DuplicateState(i, j));
                }
            }
        }
        let mut transition = transition;
        check_stochastic(&mut transition, m)?;

        if laws.len() != m || laws.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter(
                "sojourn-law table must be square with one row per state",
            ));
        }
        let laws: Vec<Option<SojournLaw>> = laws.into_iter().flatten().collect();
        for v in 0..m {
            for w in 0..m {
                match (transition[(v, w)] > 0.0, &laws[v * m + w]) {
                    (true, None) => return Err(Error::MissingSojournLaw { from: v, to: w }),
                    (false, Some(_)) => {
                        return Err(Error::UnexpectedSojournLaw { from: v, to: w })
                    }
                    (_, Some(law)) => law.validate()?,
                    (false, None) => {}
                }
            }
        }
        Ok(Self {
            states,
            transition,
            laws,
        })
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn value(&self, state: usize) -> f64 {
        self.states[state]
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn p(&self, from: usize, to: usize) -> f64 {
        self.transition[(from, to)]
    }

    pub fn law(&self, from: usize, to: usize) -> Option<&SojournLaw> {
        self.laws[from * self.len() + to].as_ref()
    }

    /// `(m_vw, m2_vw)`, zero for forbidden transitions.
    pub fn pair_moments(&self, from: usize, to: usize) -> (f64, f64) {
        self.law(from, to).map_or((0.0, 0.0), SojournLaw::moments)
    }

    /// `μ_v = E[ξ₁ | V̂₀ = v] = Σ_w p_vw m_vw`.
    pub fn mean_sojourn_from(&self, from: usize) -> f64 {
        (0..self.len())
            .map(|to| self.p(from, to) * self.pair_moments(from, to).0)
            .sum()
    }

    /// `E[ξ₁² | V̂₀ = v] = Σ_w p_vw m2_vw`.
    pub fn second_moment_from(&self, from: usize) -> f64 {
        (0..self.len())
            .map(|to| self.p(from, to) * self.pair_moments(from, to).1)
            .sum()
    }

    pub fn check_state(&self, state: usize) -> Result<()> {
        if state < self.len() {
            Ok(())
        } else {
            Err(Error::StateOutOfRange(state))
        }
    }
}

fn check_stochastic(p: &mut DMatrix<f64>, m: usize) -> Result<()> {
    if p.nrows() != m || p.ncols() != m {
        return Err(Error::InvalidStochasticMatrix(
            "transition matrix must be square with one row per state",
        ));
    }
    for row in 0..m {
        let mut sum = 0.0;
        for col in 0..m {
            let x = p[(row, col)];
            if !x.is_finite() {
                return Err(Error::InvalidStochasticMatrix("non-finite entry"));
            }
            if x < 0.0 {
                return Err(Error::InvalidStochasticMatrix("negative entry"));
            }
            sum += x;
        }
        if libm::fabs(sum - 1.0) > ROW_SUM_TOLERANCE {
            return Err(Error::RowSum { row, sum });
        }
        for col in 0..m {
            p[(row, col)] /= sum;
        }
    }
    Ok(())
}

/// Structure of the embedded chain of a kernel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainStructure {
    pub irreducible: bool,
    /// Period of state 0 (the common period when irreducible).
    pub period: usize,
    /// Invariant distribution; `None` when the chain is reducible.
    pub pi: Option<Vec<f64>>,
    /// Second-largest eigenvalue modulus of the transition matrix.
    pub slem: f64,
}

impl ChainStructure {
    pub fn is_aperiodic(&self) -> bool {
        self.period == 1
    }

    /// The invariant distribution, or `NotIrreducible`.
    pub fn pi(&self) -> Result<&[f64]> {
        self.pi.as_deref().ok_or(Error::NotIrreducible)
    }
}

/// Irreducibility, period, invariant law and SLEM of the embedded chain.
///
/// Reducibility is reported, not raised.
pub fn validate_kernel(kernel: &SemiMarkovKernel) -> ChainStructure {
    let p = kernel.transition();
    let irreducible = is_irreducible(p);
    ChainStructure {
        irreducible,
        period: period(p),
        pi: if irreducible {
            stationary_distribution(p).ok()
        } else {
            None
        },
        slem: slem(p),
    }
}

fn support(p: &DMatrix<f64>) -> Vec<Vec<usize>> {
    (0..p.nrows())
        .map(|v| (0..p.ncols()).filter(|&w| p[(v, w)] > 0.0).collect())
        .collect()
}

fn reachable_from(adjacency: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Strong connectivity of the support digraph of `p`.
pub fn is_irreducible(p: &DMatrix<f64>) -> bool {
    let forward = support(p);
    let mut backward = vec![Vec::new(); forward.len()];
    for (v, targets) in forward.iter().enumerate() {
        for &w in targets {
            backward[w].push(v);
        }
    }
    reachable_from(&forward, 0).into_iter().all(|x| x)
        && reachable_from(&backward, 0).into_iter().all(|x| x)
}

/// Period of state 0: the gcd of `level(u) + 1 - level(v)` over all support
/// edges `u -> v` among states reachable from 0, with BFS levels from 0.
pub fn period(p: &DMatrix<f64>) -> usize {
    let adjacency = support(p);
    let mut level = vec![usize::MAX; adjacency.len()];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut g = 0usize;
    for (u, targets) in adjacency.iter().enumerate() {
        if level[u] == usize::MAX {
            continue;
        }
        for &v in targets {
            g = gcd(g, (level[u] + 1).abs_diff(level[v]));
        }
    }
    g.max(1)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Unique invariant distribution of an irreducible stochastic matrix, by a
/// direct solve of `πP = π` with one balance equation replaced by `Σπ = 1`.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = p.nrows();
    if m == 0 || p.ncols() != m {
        return Err(Error::InvalidStochasticMatrix("matrix must be square"));
    }
    if !is_irreducible(p) {
        return Err(Error::NotIrreducible);
    }
    let mut a = p.transpose() - DMatrix::<f64>::identity(m, m);
    a.row_mut(m - 1).fill(1.0);
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = 1.0;
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    let total: f64 = x.iter().sum();
    Ok(x.iter().map(|xi| xi / total).collect())
}

/// Second-largest eigenvalue modulus of `p`, clamped to `[0, 1]`.
pub fn slem(p: &DMatrix<f64>) -> f64 {
    let mut moduli: Vec<f64> = p
        .complex_eigenvalues()
        .iter()
        .map(|z| libm::hypot(z.re, z.im))
        .collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.get(1).copied().unwrap_or(0.0).clamp(0.0, 1.0)
}

/// `d(n) = max_w ½ Σ_v |[Pⁿ]_wv − π_v|`.
///
/// For `n ≥ 1` this uses `Pⁿ − 1π = (P − 1π)ⁿ`, so distances far below
/// machine epsilon relative to one are still resolved.
pub fn tv_to_stationary(p: &DMatrix<f64>, pi: &[f64], n: usize) -> Result<f64> {
    let m = p.nrows();
    if pi.len() != m {
        return Err(Error::InvalidParameter("pi length must match the matrix"));
    }
    let d = period(p);
    if d > 1 {
        return Err(Error::PeriodicChain(d));
    }
    if n == 0 {
        return Ok(pi.iter().map(|x| 1.0 - x).fold(0.0, f64::max));
    }
    let projector = DMatrix::from_fn(m, m, |_, col| pi[col]);
    let deviation = p - projector;
    let mut power = deviation.clone();
    for _ in 1..n {
        power = &power * &deviation;
    }
    Ok(power
        .row_iter()
        .map(|row| 0.5 * row.iter().map(|x| libm::fabs(*x)).sum::<f64>())
        .fold(0.0, f64::max))
}
