//! Desk-scale reinforcement learning on top of `si2e-core`.
//!
//! - [`env`]: tabular MDPs, including the six-state detour fixture and
//!   gridworlds read from character maps.
//! - [`agent`]: softmax actor-critic whose reward is extrinsic reward plus a
//!   weighted intrinsic bonus (none, k-NN entropy, or value-conditional
//!   structural entropy).
//! - [`diagnostics`]: tabular representation losses logged during training.

pub mod agent;
pub mod diagnostics;
pub mod env;
pub mod error;

pub use agent::{train, EpisodeLog, EpisodeRecord, Method, PolicyTable, PolicyValue, ReplayBuffer, TrainConfig, Transition};
pub use env::{figure1_mdp, gridworld, load_env, GridworldSpec, Mdp};
pub use error::{Error, Result};
