//! Scenarios: the arms, the horizon, the algorithm and the timeline of
//! players entering and leaving.
//!
//! Rounds are numbered `1..=horizon`. An enter event takes effect at the
//! start of its round and a leave event at its end, so a leaving player
//! still plays the round it leaves in. Players get ids in order of entry:
//! the initial players are `0..initial_players`, and each later entrant
//! takes the next id.

mod config;
mod overrides;
mod presets;

pub use config::{ConfigError, ScenarioFile};
pub use overrides::{apply_override, apply_overrides, OverrideError};
pub use presets::{
    preset, preset_static, preset_theorem3, preset_theorem3_general, preset_theorem4, preset_warnings, AlgoKind,
    PresetError, PresetName, PresetOptions, Theorem3Variant, PRESET_T0,
};

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{ArmSet, EnvError, PlayerId, RewardModel};
use crate::policies::{DmcState, McState, MegaParams, MegaState, PlayerPolicy, PolicyError, RandomPolicy};

/// Where the arm means come from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeanSource {
    Explicit(Vec<f64>),
    Random(RandomMeans),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMeans {
    pub k: usize,
    pub min_gap: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmsSpec {
    pub source: MeanSource,
    pub rewards: RewardModel,
}

impl ArmsSpec {
    pub fn explicit(means: Vec<f64>, rewards: RewardModel) -> Self {
        Self { source: MeanSource::Explicit(means), rewards }
    }

    pub fn random(k: usize, min_gap: f64, seed: u64, rewards: RewardModel) -> Self {
        Self { source: MeanSource::Random(RandomMeans { k, min_gap, seed }), rewards }
    }

    pub fn k(&self) -> usize {
        match &self.source {
            MeanSource::Explicit(m) => m.len(),
            MeanSource::Random(r) => r.k,
        }
    }

    /// Builds the arm set. Random means are drawn until the gap below the
    /// `n_top`-th best arm is at least `min_gap`.
    pub fn resolve(&self, n_top: usize) -> Result<ArmSet, EnvError> {
        match &self.source {
            MeanSource::Explicit(means) => ArmSet::new(means.clone(), self.rewards),
            MeanSource::Random(r) => {
                let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
                ArmSet::random_with_gap(r.k, n_top, r.min_gap, self.rewards, &mut rng)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McParams {
    pub t0: u64,
    /// Rounds the player plans for; defaults to the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmcParams {
    pub t0: u64,
    pub t1: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "lowercase")]
pub enum Algorithm {
    Mc(McParams),
    Dmc(DmcParams),
    Mega(MegaParams),
    Random,
}

impl Algorithm {
    pub fn kind(&self) -> AlgoKind {
        match self {
            Algorithm::Mc(_) => AlgoKind::Mc,
            Algorithm::Dmc(_) => AlgoKind::Dmc,
            Algorithm::Mega(_) => AlgoKind::Mega,
            Algorithm::Random => AlgoKind::Random,
        }
    }

    /// A fresh policy for a player entering now.
    pub fn new_policy(&self, k: usize, horizon: u64) -> Result<PlayerPolicy, PolicyError> {
        Ok(match *self {
            Algorithm::Mc(p) => PlayerPolicy::Mc(McState::new(k, p.t0, p.t1.unwrap_or(horizon))?),
            Algorithm::Dmc(p) => PlayerPolicy::Dmc(DmcState::new(k, p.t0, p.t1)?),
            Algorithm::Mega(p) => PlayerPolicy::Mega(MegaState::new(k, p)?),
            Algorithm::Random => PlayerPolicy::Random(RandomPolicy::new(k)),
        })
    }
}

/// Which active player leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeaveSelector {
    /// Earliest entrant (lowest id).
    Oldest,
    /// Latest entrant (highest id).
    Newest,
    /// Uniform over the active players, drawn from the schedule stream.
    Random,
    Id(PlayerId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Enter,
    Leave(LeaveSelector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub round: u64,
    pub kind: EventKind,
}

impl Event {
    pub fn enter(round: u64) -> Self {
        Self { round, kind: EventKind::Enter }
    }

    pub fn leave(round: u64, who: LeaveSelector) -> Self {
        Self { round, kind: EventKind::Leave(who) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub arms: ArmsSpec,
    pub horizon: u64,
    pub algorithm: Algorithm,
    pub initial_players: usize,
    pub events: Vec<Event>,
    pub seeds: Vec<u64>,
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Validation {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

impl Scenario {
    pub fn k(&self) -> usize {
        self.arms.k()
    }

    /// Largest number of simultaneously active players, ignoring any
    /// events that would underflow.
    pub fn max_players(&self) -> usize {
        let mut active = self.initial_players;
        let mut max = active;
        for e in &self.events {
            match e.kind {
                EventKind::Enter => {
                    active += 1;
                    max = max.max(active);
                }
                EventKind::Leave(_) => active = active.saturating_sub(1),
            }
        }
        max
    }

    /// Every distinct number of active players over the run.
    pub fn player_counts(&self) -> BTreeSet<usize> {
        let mut active = self.initial_players;
        let mut seen = BTreeSet::from([active]);
        for e in &self.events {
            match e.kind {
                EventKind::Enter => active += 1,
                EventKind::Leave(_) => active = active.saturating_sub(1),
            }
            seen.insert(active);
        }
        seen
    }

    pub fn arm_set(&self) -> Result<ArmSet, EnvError> {
        self.arms.resolve(self.max_players())
    }

    pub fn validate(&self) -> Validation {
        validate(self)
    }
}

/// Checks every scenario invariant. Never fails; problems are listed.
pub fn validate(s: &Scenario) -> Validation {
    let mut v = Validation::default();
    let k = s.k();

    match &s.arms.source {
        MeanSource::Explicit(means) => {
            if let Err(e) = ArmSet::new(means.clone(), s.arms.rewards) {
                v.violations.push(format!("arms: {e}"));
            }
        }
        MeanSource::Random(r) => {
            if r.k < 2 {
                v.violations.push(format!("arms: need at least 2 arms, got {}", r.k));
            }
            if !(0.0..1.0).contains(&r.min_gap) {
                v.violations.push(format!("arms: min_gap {} outside [0, 1)", r.min_gap));
            }
        }
    }
    if s.horizon == 0 {
        v.violations.push("horizon must be at least 1".into());
    }
    if s.initial_players > k {
        v.violations.push(format!("{} initial players exceed {k} arms", s.initial_players));
    }

    check_algorithm(s, &mut v);
    check_events(s, k, &mut v);
    v
}

fn check_algorithm(s: &Scenario, v: &mut Validation) {
    match s.algorithm {
        Algorithm::Mc(p) => {
            if p.t0 == 0 {
                v.violations.push("mc: t0 must be at least 1".into());
            }
            if p.t0 >= s.horizon {
                v.warnings.push(format!("mc: t0 = {} leaves no rounds after learning", p.t0));
            }
            if !s.events.is_empty() {
                v.warnings.push("mc: players entering or leaving are not handled by static MC".into());
            }
        }
        Algorithm::Dmc(p) => {
            if p.t0 == 0 {
                v.violations.push("dmc: t0 must be at least 1".into());
            }
            if p.t1 <= p.t0 {
                v.violations.push(format!("dmc: t1 = {} must exceed t0 = {}", p.t1, p.t0));
            } else {
                for e in &s.events {
                    let offset = (e.round.max(1) - 1) % p.t1;
                    if offset < p.t0 {
                        v.warnings.push(format!("dmc: event at round {} falls inside a learning window", e.round));
                    }
                }
            }
        }
        Algorithm::Mega(p) => {
            if let Err(e) = p.check() {
                v.violations.push(format!("mega: {e}"));
            }
        }
        Algorithm::Random => {}
    }
}

fn check_events(s: &Scenario, k: usize, v: &mut Validation) {
    let mut prev_round = 0;
    let mut active: BTreeSet<PlayerId> = (0..s.initial_players as PlayerId).collect();
    let mut next_id = s.initial_players as PlayerId;
    let mut removed_at_random = false;
    for (i, e) in s.events.iter().enumerate() {
        if e.round < prev_round {
            v.violations.push(format!("events: event {i} at round {} is out of order", e.round));
        }
        prev_round = e.round;
        if e.round == 0 || e.round > s.horizon {
            v.violations.push(format!("events: round {} outside [1, {}]", e.round, s.horizon));
        }
        match e.kind {
            EventKind::Enter => {
                active.insert(next_id);
                next_id += 1;
                if active.len() > k {
                    v.violations.push(format!(
                        "events: {} active players at round {} exceed {k} arms",
                        active.len(),
                        e.round
                    ));
                }
            }
            EventKind::Leave(who) => {
                if active.is_empty() {
                    v.violations.push(format!("events: leave at round {} with no active player", e.round));
                    continue;
                }
                let gone = match who {
                    LeaveSelector::Oldest => active.first().copied(),
                    LeaveSelector::Newest => active.last().copied(),
                    LeaveSelector::Random => {
                        removed_at_random = true;
                        active.first().copied()
                    }
                    LeaveSelector::Id(id) => {
                        if active.contains(&id) {
                            if removed_at_random {
                                v.warnings.push(format!(
                                    "events: player {id} leaving at round {} may already have left at random",
                                    e.round
                                ));
                            }
                            Some(id)
                        } else {
                            v.violations.push(format!("events: player {id} is not active at round {}", e.round));
                            None
                        }
                    }
                };
                if let Some(id) = gone {
                    active.remove(&id);
                }
            }
        }
    }
}

/// The set of active players and id allocation, shared by validation-free
/// replay and the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roster {
    active: Vec<PlayerId>,
    next_id: PlayerId,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RosterError {
    #[error("no active player to remove")]
    Empty,
    #[error("player {0} is not active")]
    NotActive(PlayerId),
}

impl Roster {
    pub fn new(initial_players: usize) -> Self {
        Self { active: (0..initial_players as PlayerId).collect(), next_id: initial_players as PlayerId }
    }

    /// Active ids in ascending order.
    pub fn active(&self) -> &[PlayerId] {
        &self.active
    }

    pub fn enter(&mut self) -> PlayerId {
        let id = self.next_id;
        self.next_id += 1;
        self.active.push(id);
        id
    }

    pub fn leave<R: Rng + ?Sized>(&mut self, who: LeaveSelector, rng: &mut R) -> Result<PlayerId, RosterError> {
        if self.active.is_empty() {
            return Err(RosterError::Empty);
        }
        let pos = match who {
            LeaveSelector::Oldest => 0,
            LeaveSelector::Newest => self.active.len() - 1,
            LeaveSelector::Random => rng.gen_range(0..self.active.len()),
            LeaveSelector::Id(id) => self.active.iter().position(|&a| a == id).ok_or(RosterError::NotActive(id))?,
        };
        Ok(self.active.remove(pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn base() -> Scenario {
        Scenario {
            arms: ArmsSpec::explicit(vec![0.9, 0.5, 0.1], RewardModel::Bernoulli),
            horizon: 100,
            algorithm: Algorithm::Random,
            initial_players: 1,
            events: vec![],
            seeds: vec![0],
        }
    }

    #[test]
    fn static_scenario_is_valid() {
        assert!(validate(&base()).is_ok());
    }

    #[test]
    fn out_of_range_round() {
        let mut s = base();
        s.events.push(Event::enter(101));
        assert!(!validate(&s).is_ok());
        s.events = vec![Event::enter(0)];
        assert!(!validate(&s).is_ok());
    }

    #[test]
    fn leave_underflow() {
        let mut s = base();
        s.initial_players = 0;
        s.events.push(Event::leave(5, LeaveSelector::Oldest));
        let v = validate(&s);
        assert_eq!(v.violations.len(), 1, "{v}");
    }

    #[test]
    fn too_many_players_and_disorder() {
        let mut s = base();
        s.initial_players = 3;
        s.events.push(Event::enter(10));
        s.events.push(Event::leave(5, LeaveSelector::Newest));
        let v = validate(&s);
        assert_eq!(v.violations.len(), 2, "{v}");
    }

    #[test]
    fn unknown_leaver() {
        let mut s = base();
        s.events.push(Event::leave(5, LeaveSelector::Id(7)));
        assert!(!validate(&s).is_ok());
        s.events = vec![Event::enter(3), Event::leave(5, LeaveSelector::Id(1))];
        assert!(validate(&s).is_ok());
    }

    #[test]
    fn dmc_learning_window_warning() {
        let mut s = base();
        s.algorithm = Algorithm::Dmc(DmcParams { t0: 10, t1: 30 });
        s.events.push(Event::enter(35));
        s.events.push(Event::leave(55, LeaveSelector::Oldest));
        let v = validate(&s);
        assert!(v.is_ok());
        assert_eq!(v.warnings.len(), 1, "{v}");
        s.algorithm = Algorithm::Dmc(DmcParams { t0: 10, t1: 10 });
        assert!(!validate(&s).is_ok());
    }

    #[test]
    fn roster_selectors() {
        let mut rng = stream(0, Stream::Schedule);
        let mut r = Roster::new(3);
        assert_eq!(r.enter(), 3);
        assert_eq!(r.leave(LeaveSelector::Oldest, &mut rng), Ok(0));
        assert_eq!(r.leave(LeaveSelector::Newest, &mut rng), Ok(3));
        assert_eq!(r.leave(LeaveSelector::Id(9), &mut rng), Err(RosterError::NotActive(9)));
        let gone = r.leave(LeaveSelector::Random, &mut rng).unwrap();
        assert!(gone == 1 || gone == 2);
        r.leave(LeaveSelector::Random, &mut rng).unwrap();
        assert_eq!(r.leave(LeaveSelector::Random, &mut rng), Err(RosterError::Empty));
    }

    #[test]
    fn max_players_follows_events() {
        let mut s = base();
        s.events = vec![Event::enter(2), Event::leave(3, LeaveSelector::Oldest), Event::enter(4)];
        assert_eq!(s.max_players(), 2);
        assert_eq!(s.player_counts(), BTreeSet::from([1, 2]));
    }
}
