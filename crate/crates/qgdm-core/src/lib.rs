//! Quantum game decision-making for interaction-aware autonomous driving.
//!
//! The crate is organized bottom-up:
//!
//! - [`quantum`] — dense complex linear algebra, gates, the parameterized
//!   unitary, and the entangling operator.
//! - [`game`] — normal-form games, dominance pruning, Nash enumeration,
//!   expected utility, and classical probability providers.
//! - [`circuits`] — the player-strategy quantum circuits and their presets,
//!   mapping final states to probability distributions over action profiles.
//! - [`payoff`] — short-horizon rollouts scored into game payoffs.
//! - [`sim`] — a kinematic traffic simulator (paths, vehicles, IDM/MOBIL,
//!   collision detection, episode loop).
//! - [`policy`] — the decision pipeline and the non-game baselines.
//! - [`harness`] — batch experiment runner, aggregation, and report output.

pub mod circuits;
pub mod payoff;
pub mod policy;
pub mod game;
pub mod harness;
pub mod quantum;
pub mod sim;
