//! The round loop.
//!
//! Each round: players scheduled to enter join, every arm draws a reward,
//! every active player (in ascending id order) picks an arm or abstains,
//! collisions are resolved, each puller gets its own feedback, regret is
//! charged against the best allocation of the `N_t` active players, and
//! finally players scheduled to leave are removed.

mod batch;
mod trace;

pub use batch::{run_batch, run_batch_with, BatchResult, SummaryRow};
pub use trace::{decompose, EpochLog, PlayerLog, PlayerPlay, RegretSplit, RegretTerm, RoundRecord, Trace};

use thiserror::Error;

use crate::env::{EnvError, PlayerId, PlayerOutcome, Resolver};
use crate::policies::{Feedback, Phase, PlayerPolicy, PolicyError};
use crate::rng::{stream, SimRng, Stream};
use crate::schedule::{Algorithm, EventKind, Roster, RosterError, Scenario};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("scenario is invalid:\n{0}")]
    Invalid(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("policy error: {0}")]
    Policy(#[from] PolicyError),
    #[error("schedule error: {0}")]
    Roster(#[from] RosterError),
    #[error("invariant breached at round {round}: {what}")]
    InvariantBreach { round: u64, what: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Record every `decimate`-th round only (and always the last one).
    pub decimate: u64,
    /// Keep every player's per-round play. Ignored when decimating.
    pub keep_plays: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { decimate: 1, keep_plays: true }
    }
}

/// Runs `scenario` with master seed `seed`, keeping everything.
pub fn run(scenario: &Scenario, seed: u64) -> Result<Trace, EngineError> {
    run_with(scenario, seed, RunOptions::default())
}

pub fn run_with(scenario: &Scenario, seed: u64, opts: RunOptions) -> Result<Trace, EngineError> {
    let k = scenario.k();
    let horizon = scenario.horizon;
    let algorithm = scenario.algorithm;
    run_with_factory(scenario, seed, opts, |_, _| algorithm.new_policy(k, horizon))
}

struct Slot {
    policy: PlayerPolicy,
    rng: SimRng,
    log: usize,
    resets_seen: u64,
    fixed_noted: bool,
    pulled: Option<usize>,
}

/// Like [`run_with`], but every entering player's policy comes from
/// `factory(id, round)` instead of the scenario's algorithm.
pub fn run_with_factory<F>(
    scenario: &Scenario,
    seed: u64,
    opts: RunOptions,
    mut factory: F,
) -> Result<Trace, EngineError>
where
    F: FnMut(PlayerId, u64) -> Result<PlayerPolicy, PolicyError>,
{
    let validation = scenario.validate();
    if !validation.is_ok() {
        return Err(EngineError::Invalid(validation.to_string()));
    }
    let decimate = opts.decimate.max(1);
    let keep_plays = opts.keep_plays && decimate == 1;
    let arms = scenario.arm_set()?;
    let k = arms.k();
    let horizon = scenario.horizon;
    let mc_family = matches!(scenario.algorithm, Algorithm::Mc(_) | Algorithm::Dmc(_));

    let mut env_rng = stream(seed, Stream::Environment);
    let mut schedule_rng = stream(seed, Stream::Schedule);
    let mut roster = Roster::new(scenario.initial_players);
    let mut slots: Vec<Option<Slot>> = Vec::new();
    let mut players: Vec<PlayerLog> = Vec::new();

    let mut spawn = |id: PlayerId, round: u64, slots: &mut Vec<Option<Slot>>, players: &mut Vec<PlayerLog>| {
        let policy = factory(id, round)?;
        debug_assert_eq!(slots.len(), id as usize);
        players.push(PlayerLog { id, entered: round, left: None, epochs: Vec::new(), epoch_resets: Vec::new() });
        if matches!(policy, PlayerPolicy::Mc(_)) {
            players.last_mut().unwrap().epochs.push(EpochLog { start: round, ..Default::default() });
        }
        slots.push(Some(Slot {
            policy,
            rng: stream(seed, Stream::Player(id)),
            log: players.len() - 1,
            resets_seen: 0,
            fixed_noted: false,
            pulled: None,
        }));
        Ok::<(), EngineError>(())
    };
    for &id in roster.active() {
        spawn(id, 1, &mut slots, &mut players)?;
    }

    let mut records =
        Vec::with_capacity(if decimate == 1 { horizon as usize } else { (horizon / decimate) as usize + 1 });
    let mut plays: Vec<PlayerPlay> = Vec::new();
    let mut rewards = Vec::with_capacity(k);
    let mut choices: Vec<(PlayerId, usize)> = Vec::with_capacity(k);
    let mut outcomes: Vec<PlayerOutcome> = Vec::with_capacity(k);
    let mut resolver = Resolver::new(k);
    let mut cum = 0.0;
    let mut realized = 0.0;
    let mut split = RegretSplit::default();
    let mut split_complete = true;
    let mut next_event = 0;

    for round in 1..=horizon {
        let clock = round - 1;
        let first_today = next_event;
        while let Some(e) = scenario.events.get(next_event).filter(|e| e.round == round) {
            if e.kind == EventKind::Enter {
                let id = roster.enter();
                spawn(id, round, &mut slots, &mut players)?;
            }
            next_event += 1;
        }

        arms.sample_rewards_into(&mut env_rng, &mut rewards);

        choices.clear();
        let mut any_free = false;
        let mut any_settling = false;
        let mut any_late = false;
        for &id in roster.active() {
            let slot = slots[id as usize].as_mut().expect("active player has a slot");
            let action = slot.policy.act(clock, &mut slot.rng)?;
            let resets = slot.policy.epoch_resets();
            if resets != slot.resets_seen {
                slot.resets_seen = resets;
                slot.fixed_noted = false;
                let log = &mut players[slot.log];
                log.epoch_resets.push(round);
                log.epochs.push(EpochLog { start: round, ..Default::default() });
            }
            match slot.policy.phase() {
                Phase::Learning | Phase::MusicalChairs => any_settling = true,
                Phase::LateEntry => any_late = true,
                Phase::Fixed => {}
                Phase::Free => any_free = true,
            }
            slot.pulled = action.map(|a| a.arm);
            if let Some(a) = action {
                choices.push((id, a.arm));
            }
        }
        let n_active = roster.active().len();
        let regret = resolver.resolve(&arms, &choices, &rewards, n_active, &mut outcomes)?;

        let mut collisions = 0;
        let mut round_reward = 0.0;
        for o in &outcomes {
            let slot = slots[o.player as usize].as_mut().expect("puller has a slot");
            slot.policy.observe(Feedback { collided: o.collided, reward: o.reward })?;
            collisions += o.collided as usize;
            round_reward += o.reward;
            if !slot.fixed_noted {
                note_progress(slot, &mut players[slot.log], round);
            }
        }

        if !(regret >= 0.0 && regret.is_finite()) {
            return Err(EngineError::InvariantBreach {
                round,
                what: format!("regret {regret} is not a finite non-negative number"),
            });
        }
        let sampled: f64 = rewards.iter().sum();
        if round_reward > sampled + 1e-9 {
            return Err(EngineError::InvariantBreach {
                round,
                what: format!("players received {round_reward}, arms only produced {sampled}"),
            });
        }
        cum += regret;
        realized += round_reward;

        let term = if any_free || (n_active == 0 && !mc_family) {
            None
        } else if any_settling {
            Some(RegretTerm::LearningFixing)
        } else if any_late {
            Some(RegretTerm::Entering)
        } else {
            Some(RegretTerm::Leaving)
        };
        match term {
            Some(t) => split.add(t, regret),
            None => split_complete = false,
        }

        if decimate == 1 || round % decimate == 0 || round == horizon {
            let start = plays.len();
            if keep_plays {
                let mut next = outcomes.iter().peekable();
                for &id in roster.active() {
                    let slot = slots[id as usize].as_ref().expect("active player has a slot");
                    let play = match (slot.pulled, next.peek()) {
                        (Some(_), Some(o)) if o.player == id => {
                            let o = next.next().unwrap();
                            PlayerPlay { player: id, arm: Some(o.arm), collided: o.collided, reward: o.reward }
                        }
                        _ => PlayerPlay { player: id, arm: None, collided: false, reward: 0.0 },
                    };
                    plays.push(play);
                }
            }
            records.push(RoundRecord::new(round, n_active, regret, cum, collisions, term, (start, plays.len())));
        }

        for e in &scenario.events[first_today..next_event] {
            if let EventKind::Leave(who) = e.kind {
                let id = roster.leave(who, &mut schedule_rng)?;
                let slot = slots[id as usize].take().expect("leaver has a slot");
                players[slot.log].left = Some(round);
            }
        }
    }

    Ok(Trace {
        seed,
        horizon,
        decimate,
        records,
        plays,
        players,
        total_regret: cum,
        realized_reward: realized,
        split: split_complete.then_some(split),
    })
}

/// Copies the learning outcome and the fixing round of the current MC run
/// into the player's log.
fn note_progress(slot: &mut Slot, log: &mut PlayerLog, round: u64) {
    let Some(mc) = slot.policy.mc() else { return };
    let Some(epoch) = log.epochs.last_mut() else { return };
    if epoch.n_star.is_none() {
        if let Some(n) = mc.n_star() {
            epoch.n_star = Some(n);
            epoch.ranking = Some(mc.ranking().to_vec());
        }
    }
    if let Some(arm) = mc.fixed_arm() {
        epoch.fixed = Some((round, arm));
        slot.fixed_noted = true;
    }
}
