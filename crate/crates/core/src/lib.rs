//! Game-theoretic model of a defender using steganography against a
//! surveilling adversary.
//!
//! - [`model`]: payoff parameters, the nine modelling assumptions and the
//!   2x2 payoff matrix.
//! - [`equilibrium`]: pure-equilibrium scan, closed-form mixed equilibrium,
//!   expected-payoff curves and a support-enumeration oracle.
//! - [`analysis`]: success rates, adversary advantage, risk and
//!   sensitivities of the equilibrium.
//! - [`montecarlo`]: seeded, parallel risk simulation.
//! - [`cli`]: the command implementations behind the `stego-risk` binary.

pub mod analysis;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod montecarlo;

pub use error::{GameError, ModelError, SimulationError};
pub use model::{GameParams, PayoffMatrix};
