//! Markov renewal and semi-Markov process laboratory.
//!
//! The crate covers a finite-state Markov renewal process `(V̂, S)` with a
//! semi-Markov kernel `Q_vw(t) = p_vw F_vw(t)`, the semi-Markov velocity
//! process `V(t) = V̂_{N(t)}` and its integral `X(t)`:
//!
//! * [`kernel`]: kernel data model, stationary law, period and mixing rate of
//!   the embedded chain;
//! * [`simulate`]: exact trajectory sampling and the derived processes
//!   `N(t)`, `V(t)`, `X(t)`, `R(t)` and the diffusively scaled `X_λ`;
//! * [`regen`]: regenerative cycle decomposition and cycle estimators;
//! * [`limits`]: drift `θ`, mean sojourn `μ` and limit variance `γ²`;
//! * [`telegraph`]: alternating renewal kernels and the telegraph process;
//! * [`verify`]: statistical checks of the limit theorems.
//!
//! Everything here is `no_std` (with `alloc`); file formats, configuration
//! and the command line live in the companion `semimarkov-lab` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod exec;
pub mod kernel;
pub mod limits;
pub mod observable;
pub mod quadrature;
pub mod reference;
pub mod regen;
pub mod rng;
pub mod simulate;
pub mod special;
pub mod stats;
pub mod telegraph;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{validate_kernel, ChainStructure, SemiMarkovKernel, SojournLaw};
pub use limits::{limit_parameters, LimitMethod, LimitOptions, LimitParameters};
pub use observable::Observable;
pub use simulate::{Initial, Mode, Trajectory};
