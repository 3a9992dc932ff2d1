//! What a run leaves behind, and its CSV forms.

use std::io::{self, Write};

use crate::env::PlayerId;

/// One active player's part in one round. `arm` is `None` when the player
/// sat the round out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlayerPlay {
    pub player: PlayerId,
    pub arm: Option<usize>,
    pub collided: bool,
    pub reward: f64,
}

/// Which part of the DMC regret a round is charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegretTerm {
    /// Some player is learning or looking for a free arm.
    LearningFixing,
    /// Every player has settled except late entrants waiting for the next
    /// epoch.
    Entering,
    /// Every player is fixed; any loss comes from arms freed by leavers.
    Leaving,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub n_active: usize,
    pub regret_inst: f64,
    pub regret_cum: f64,
    /// Players that collided this round.
    pub collisions: usize,
    pub term: Option<RegretTerm>,
    pub(crate) plays: (usize, usize),
}

impl RoundRecord {
    pub(crate) fn new(
        round: u64,
        n_active: usize,
        regret_inst: f64,
        regret_cum: f64,
        collisions: usize,
        term: Option<RegretTerm>,
        plays: (usize, usize),
    ) -> Self {
        Self { round, n_active, regret_inst, regret_cum, collisions, term, plays }
    }
}

/// One MC run of one player: the whole horizon for MC, one epoch for DMC.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpochLog {
    pub start: u64,
    pub n_star: Option<usize>,
    pub ranking: Option<Vec<usize>>,
    /// Round and arm of the first collision-free Musical Chairs pull.
    pub fixed: Option<(u64, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerLog {
    pub id: PlayerId,
    pub entered: u64,
    /// Last round played.
    pub left: Option<u64>,
    pub epochs: Vec<EpochLog>,
    pub epoch_resets: Vec<u64>,
}

/// Regret split by [`RegretTerm`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RegretSplit {
    pub learning_fixing: f64,
    pub entering: f64,
    pub leaving: f64,
}

impl RegretSplit {
    pub fn total(&self) -> f64 {
        self.learning_fixing + self.entering + self.leaving
    }

    pub(crate) fn add(&mut self, term: RegretTerm, r: f64) {
        match term {
            RegretTerm::LearningFixing => self.learning_fixing += r,
            RegretTerm::Entering => self.entering += r,
            RegretTerm::Leaving => self.leaving += r,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub seed: u64,
    pub horizon: u64,
    /// Every `decimate`-th round is recorded (plus the last one).
    pub decimate: u64,
    pub records: Vec<RoundRecord>,
    pub(crate) plays: Vec<PlayerPlay>,
    pub players: Vec<PlayerLog>,
    /// Exact cumulative regret, independent of decimation.
    pub total_regret: f64,
    /// Sum of the rewards players actually received.
    pub realized_reward: f64,
    /// Regret per term, when every round could be charged to one.
    pub split: Option<RegretSplit>,
}

impl Trace {
    /// Plays of a round; empty when plays were not kept.
    pub fn plays(&self, record: &RoundRecord) -> &[PlayerPlay] {
        self.plays.get(record.plays.0..record.plays.1).unwrap_or(&[])
    }

    pub fn has_plays(&self) -> bool {
        !self.plays.is_empty() || self.records.iter().all(|r| r.n_active == 0)
    }

    /// Cumulative regret divided by the round index, per recorded round.
    pub fn average_regret(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.records.iter().map(|r| (r.round, r.regret_cum / r.round as f64))
    }

    /// Latest round at which any player fixed, over all epochs.
    pub fn last_fix_round(&self) -> Option<u64> {
        self.players.iter().flat_map(|p| p.epochs.iter().filter_map(|e| e.fixed.map(|f| f.0))).max()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round,n_active,regret_inst,regret_cum,collisions")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{},{}", r.round, r.n_active, r.regret_inst, r.regret_cum, r.collisions)?;
        }
        Ok(())
    }

    /// Lifecycle events, ordered by round and then player.
    pub fn events(&self) -> Vec<(PlayerId, &'static str, u64)> {
        let mut out = Vec::new();
        for p in &self.players {
            out.push((p.id, "enter", p.entered));
            out.extend(p.epoch_resets.iter().map(|&r| (p.id, "epoch_reset", r)));
            out.extend(p.epochs.iter().filter_map(|e| e.fixed.map(|(r, _)| (p.id, "fixed", r))));
            if let Some(r) = p.left {
                out.push((p.id, "leave", r));
            }
        }
        let rank = |e: &str| match e {
            "enter" => 0,
            "epoch_reset" => 1,
            "fixed" => 2,
            _ => 3,
        };
        out.sort_by_key(|&(id, e, r)| (r, id, rank(e)));
        out
    }

    pub fn write_events_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "player,event,round")?;
        for (id, event, round) in self.events() {
            writeln!(w, "{id},{event},{round}")?;
        }
        Ok(())
    }
}

/// Recomputes the regret split from the per-round records. `None` when the
/// trace is decimated or some round has no term.
pub fn decompose(trace: &Trace) -> Option<RegretSplit> {
    if trace.decimate != 1 || trace.records.len() as u64 != trace.horizon {
        return None;
    }
    let mut split = RegretSplit::default();
    for r in &trace.records {
        split.add(r.term?, r.regret_inst);
    }
    Some(split)
}
