use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid stochastic matrix: {0}")]
    InvalidStochasticMatrix(&'static str),
    #[error("row {row} of the transition matrix sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("transition ({from}, {to}) has positive probability but no sojourn law")]
    MissingSojournLaw { from: usize, to: usize },
    #[error("transition ({from}, {to}) has zero probability but carries a sojourn law")]
    UnexpectedSojournLaw { from: usize, to: usize },
    #[error("state labels must be pairwise distinct (states {0} and {1} share a value)")]
    DuplicateState(usize, usize),
    #[error("at least two states are required, got {0}")]
    TooFewStates(usize),
    #[error("invalid sojourn law: {0}")]
    InvalidSojournLaw(&'static str),
    #[error("embedded chain is not irreducible")]
    NotIrreducible,
    #[error("embedded chain is periodic with period {0}")]
    PeriodicChain(usize),
    #[error("time {t} lies beyond the trajectory horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("adaptive quadrature did not reach tolerance {tolerance} (estimated error {error})")]
    QuadratureFailure { tolerance: f64, error: f64 },
    #[error("covariance series did not converge after {0} lags")]
    SeriesNotConverged(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("linear solve failed: singular system")]
    Singular,
}
