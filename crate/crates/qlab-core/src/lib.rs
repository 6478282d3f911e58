//! Numerics for pure-state ensembles: accessible fidelity, quantumness, and
//! maximal output norms of completely positive maps, with matched lower
//! bounds (explicit measurement strategies) and upper bounds (dual
//! certificates) so every reported quantity carries a verifiable bracket.
//!
//! The crate is `no_std` + `alloc`; all floating-point math goes through
//! `libm` via `num-traits`. Randomness is always explicit: every sampler
//! takes a seed and derives per-restart streams deterministically.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod eig;
pub mod ensemble;
pub mod error;
pub mod fidelity;
mod fmath;
pub mod mat;
pub mod povm;
pub mod products;
pub mod quantumness;
pub mod sample;
pub mod state;

pub use channel::{CpMap, NuInfReport};
pub use ensemble::{Ensemble, JointDistribution};
pub use error::{Error, Result};
pub use mat::Mat;
pub use povm::{HermitianOp, Povm};
pub use state::PureState;
