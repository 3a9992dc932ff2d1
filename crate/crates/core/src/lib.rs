//! Simulation of communication-free multi-player stochastic bandits.
//!
//! Players pick among `K` arms every round without talking to each other;
//! when two or more pick the same arm they collide and nobody is paid.
//! The crate provides:
//!
//! * [`env`]: arms, reward sampling, collision resolution and the exact
//!   regret oracle against the best static allocation,
//! * [`policies`]: per-player state machines (Musical Chairs, Dynamic
//!   Musical Chairs with a late-entry heuristic, MEGA, uniform random),
//! * [`schedule`]: scenarios, their JSON file format, validation and the
//!   named experiment presets,
//! * [`engine`]: the round loop, traces, CSV export and seed batches,
//! * [`bounds`]: closed-form parameter and regret-bound calculators.

pub mod bounds;
pub mod engine;
pub mod env;
pub mod policies;
pub mod rng;
pub mod schedule;

pub use engine::{run, run_batch, BatchResult, EngineError, Trace};
pub use env::{ArmSet, RewardModel};
pub use schedule::{Algorithm, Scenario};
