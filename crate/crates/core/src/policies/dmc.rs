//! Dynamic Musical Chairs: Musical Chairs restarted every `T1` rounds on a
//! shared clock.

use rand::Rng;

use super::{Feedback, LateEntryState, McState, Phase, PolicyAction, PolicyError};

#[derive(Clone, Debug)]
enum Mode {
    LateEntry(LateEntryState),
    Mc(McState),
}

#[derive(Clone, Debug)]
pub struct DmcState {
    k: usize,
    t0: u64,
    t1: u64,
    mode: Mode,
    /// Index of the epoch the current MC run belongs to.
    epoch: Option<u64>,
    resets: u64,
}

impl DmcState {
    /// A fresh player. Until the first epoch boundary it follows the
    /// late-entry heuristic; a player created exactly on a boundary starts
    /// MC on its first action.
    pub fn new(k: usize, t0: u64, t1: u64) -> Result<Self, PolicyError> {
        if t1 <= t0 {
            return Err(PolicyError::InvalidConfig(format!("DMC needs T1 > T0, got T1={t1}, T0={t0}")));
        }
        McState::new(k, t0, t1)?;
        Ok(Self { k, t0, t1, mode: Mode::LateEntry(LateEntryState::new(k)), epoch: None, resets: 0 })
    }

    pub fn act<R: Rng + ?Sized>(&mut self, clock: u64, rng: &mut R) -> Result<PolicyAction, PolicyError> {
        let epoch = clock / self.t1;
        if clock.is_multiple_of(self.t1) && self.epoch != Some(epoch) {
            self.mode = Mode::Mc(McState::new(self.k, self.t0, self.t1)?);
            self.epoch = Some(epoch);
            self.resets += 1;
        }
        match &mut self.mode {
            Mode::LateEntry(s) => s.act(rng),
            Mode::Mc(s) => s.act(rng),
        }
    }

    pub fn observe(&mut self, feedback: Feedback) -> Result<(), PolicyError> {
        match &mut self.mode {
            Mode::LateEntry(s) => s.observe(feedback),
            Mode::Mc(s) => s.observe(feedback),
        }
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        clock: u64,
        feedback: Option<Feedback>,
        rng: &mut R,
    ) -> Result<PolicyAction, PolicyError> {
        if let Some(fb) = feedback {
            self.observe(fb)?;
        }
        self.act(clock, rng)
    }

    pub fn phase(&self) -> Phase {
        match &self.mode {
            Mode::LateEntry(_) => Phase::LateEntry,
            Mode::Mc(s) => s.phase().into(),
        }
    }

    pub fn mc(&self) -> Option<&McState> {
        match &self.mode {
            Mode::Mc(s) => Some(s),
            Mode::LateEntry(_) => None,
        }
    }

    pub fn epoch(&self) -> Option<u64> {
        self.epoch
    }

    pub fn resets(&self) -> u64 {
        self.resets
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }

    pub fn t1(&self) -> u64 {
        self.t1
    }
}
