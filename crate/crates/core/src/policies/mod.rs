//! Per-player decision rules.
//!
//! A policy sees only its own history: the arm it pulled, whether it
//! collided, the reward it got, and the global round clock. The engine calls
//! [`PlayerPolicy::act`] at the start of a round and [`PlayerPolicy::observe`]
//! at its end.

mod dmc;
mod late_entry;
mod mc;
mod mega;
mod random;

pub use dmc::DmcState;
pub use late_entry::LateEntryState;
pub use mc::{estimate_players, McPhase, McState};
pub use mega::{MegaParams, MegaState, NoArmRule};
pub use random::RandomPolicy;

use rand::Rng;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feedback {
    pub collided: bool,
    pub reward: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolicyAction {
    pub arm: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("no feedback delivered for the previous pull")]
    MissingFeedback,
    #[error("feedback delivered without a pending pull")]
    UnexpectedFeedback,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Coarse phase of a player, used for trace bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Learning,
    MusicalChairs,
    Fixed,
    LateEntry,
    /// Policies without phases (MEGA, random).
    Free,
}

#[derive(Clone, Debug)]
pub enum PlayerPolicy {
    Mc(McState),
    Dmc(DmcState),
    Mega(MegaState),
    Random(RandomPolicy),
}

impl PlayerPolicy {
    /// Chooses this round's arm; `None` means the player sits the round out.
    /// `clock` is the zero-based global round index.
    pub fn act<R: Rng + ?Sized>(&mut self, clock: u64, rng: &mut R) -> Result<Option<PolicyAction>, PolicyError> {
        match self {
            PlayerPolicy::Mc(s) => s.act(rng).map(Some),
            PlayerPolicy::Dmc(s) => s.act(clock, rng).map(Some),
            PlayerPolicy::Mega(s) => s.act(rng),
            PlayerPolicy::Random(s) => Ok(Some(s.act(rng))),
        }
    }

    pub fn observe(&mut self, feedback: Feedback) -> Result<(), PolicyError> {
        match self {
            PlayerPolicy::Mc(s) => s.observe(feedback),
            PlayerPolicy::Dmc(s) => s.observe(feedback),
            PlayerPolicy::Mega(s) => s.observe(feedback),
            PlayerPolicy::Random(_) => Ok(()),
        }
    }

    /// Receive-then-act in one call.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        clock: u64,
        feedback: Option<Feedback>,
        rng: &mut R,
    ) -> Result<Option<PolicyAction>, PolicyError> {
        if let Some(fb) = feedback {
            self.observe(fb)?;
        }
        self.act(clock, rng)
    }

    pub fn phase(&self) -> Phase {
        match self {
            PlayerPolicy::Mc(s) => s.phase().into(),
            PlayerPolicy::Dmc(s) => s.phase(),
            PlayerPolicy::Mega(_) | PlayerPolicy::Random(_) => Phase::Free,
        }
    }

    /// The MC run currently in charge, if any.
    pub fn mc(&self) -> Option<&McState> {
        match self {
            PlayerPolicy::Mc(s) => Some(s),
            PlayerPolicy::Dmc(s) => s.mc(),
            _ => None,
        }
    }

    /// Number of epoch restarts so far (DMC only).
    pub fn epoch_resets(&self) -> u64 {
        match self {
            PlayerPolicy::Dmc(s) => s.resets(),
            _ => 0,
        }
    }
}

impl From<McPhase> for Phase {
    fn from(p: McPhase) -> Self {
        match p {
            McPhase::Learning => Phase::Learning,
            McPhase::MusicalChairs => Phase::MusicalChairs,
            McPhase::Fixed => Phase::Fixed,
        }
    }
}
