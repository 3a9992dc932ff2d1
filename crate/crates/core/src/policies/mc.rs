//! Musical Chairs: learn, estimate the player count, then grab a chair.

use rand::Rng;

use super::{Feedback, PolicyAction, PolicyError};
use crate::env::ranking_by;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McPhase {
    /// Uniform exploration for `T0` rounds.
    Learning,
    /// Uniform choice among the top `n_star` ranked arms until a clean pull.
    MusicalChairs,
    /// Holding one arm for the rest of the run.
    Fixed,
}

/// Estimated number of players from `collisions` seen in `t0` rounds of
/// uniform exploration over `k` arms.
///
/// Inverts `p = 1 - (1 - 1/k)^(n - 1)` at the empirical collision rate,
/// rounds, and clamps to `[1, k]`. All-collision runs map to `k`.
pub fn estimate_players(collisions: u64, t0: u64, k: usize) -> usize {
    assert!(t0 >= 1 && k >= 2, "estimator needs t0 >= 1 and k >= 2");
    let collisions = collisions.min(t0);
    if collisions == t0 {
        return k;
    }
    let free_rate = (t0 - collisions) as f64 / t0 as f64;
    let raw = free_rate.ln() / (1.0 - 1.0 / k as f64).ln() + 1.0;
    (raw.round() as usize).clamp(1, k)
}

/// One player's private Musical Chairs state.
#[derive(Clone, Debug)]
pub struct McState {
    k: usize,
    t0: u64,
    t1: u64,
    phase: McPhase,
    /// Collision-free observations per arm.
    observations: Vec<u64>,
    reward_sums: Vec<f64>,
    collisions: u64,
    ranking: Vec<usize>,
    n_star: usize,
    fixed_arm: Option<usize>,
    local_t: u64,
    last_arm: Option<usize>,
    awaiting_feedback: bool,
}

impl McState {
    pub fn new(k: usize, t0: u64, t1: u64) -> Result<Self, PolicyError> {
        if k < 2 {
            return Err(PolicyError::InvalidConfig(format!("MC needs k >= 2, got {k}")));
        }
        if t0 == 0 {
            return Err(PolicyError::InvalidConfig("MC needs T0 >= 1".into()));
        }
        Ok(Self {
            k,
            t0,
            t1,
            phase: McPhase::Learning,
            observations: vec![0; k],
            reward_sums: vec![0.0; k],
            collisions: 0,
            ranking: Vec::new(),
            n_star: 0,
            fixed_arm: None,
            local_t: 0,
            last_arm: None,
            awaiting_feedback: false,
        })
    }

    /// A state that skips learning and starts in the Musical Chairs phase
    /// with a given ranking and player estimate.
    pub fn musical_chairs(ranking: Vec<usize>, n_star: usize, t1: u64) -> Result<Self, PolicyError> {
        let k = ranking.len();
        let mut sorted = ranking.clone();
        sorted.sort_unstable();
        if k < 2 || sorted.iter().enumerate().any(|(i, &a)| i != a) {
            return Err(PolicyError::InvalidConfig("ranking must be a permutation of 0..k".into()));
        }
        if !(1..=k).contains(&n_star) {
            return Err(PolicyError::InvalidConfig(format!("n_star {n_star} outside [1, {k}]")));
        }
        let mut state = Self::new(k, 1, t1)?;
        state.t0 = 0;
        state.phase = McPhase::MusicalChairs;
        state.ranking = ranking;
        state.n_star = n_star;
        Ok(state)
    }

    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<PolicyAction, PolicyError> {
        if self.awaiting_feedback {
            return Err(PolicyError::MissingFeedback);
        }
        let arm = match self.phase {
            McPhase::Learning => rng.gen_range(0..self.k),
            McPhase::MusicalChairs => self.ranking[rng.gen_range(0..self.n_star)],
            McPhase::Fixed => self.fixed_arm.expect("fixed phase without an arm"),
        };
        self.local_t += 1;
        self.last_arm = Some(arm);
        self.awaiting_feedback = true;
        Ok(PolicyAction { arm })
    }

    pub fn observe(&mut self, feedback: Feedback) -> Result<(), PolicyError> {
        if !self.awaiting_feedback {
            return Err(PolicyError::UnexpectedFeedback);
        }
        self.awaiting_feedback = false;
        let arm = self.last_arm.expect("pending pull has an arm");
        match self.phase {
            McPhase::Learning => {
                if feedback.collided {
                    self.collisions += 1;
                } else {
                    self.observations[arm] += 1;
                    self.reward_sums[arm] += feedback.reward;
                }
                if self.local_t == self.t0 {
                    self.finish_learning();
                }
            }
            McPhase::MusicalChairs => {
                if !feedback.collided {
                    self.fixed_arm = Some(arm);
                    self.phase = McPhase::Fixed;
                }
            }
            McPhase::Fixed => {}
        }
        Ok(())
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        feedback: Option<Feedback>,
        rng: &mut R,
    ) -> Result<PolicyAction, PolicyError> {
        if let Some(fb) = feedback {
            self.observe(fb)?;
        }
        self.act(rng)
    }

    fn finish_learning(&mut self) {
        self.ranking = ranking_by(&self.empirical_means());
        self.n_star = estimate_players(self.collisions, self.t0, self.k);
        self.phase = McPhase::MusicalChairs;
    }

    /// `s_i / o_i`, or 0 for arms never observed cleanly.
    pub fn empirical_means(&self) -> Vec<f64> {
        self.observations
            .iter()
            .zip(&self.reward_sums)
            .map(|(&o, &s)| if o == 0 { 0.0 } else { s / o as f64 })
            .collect()
    }

    pub fn phase(&self) -> McPhase {
        self.phase
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }

    pub fn t1(&self) -> u64 {
        self.t1
    }

    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    pub fn observations(&self) -> &[u64] {
        &self.observations
    }

    /// Arms sorted by empirical mean; empty while learning.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Player-count estimate; `None` while learning.
    pub fn n_star(&self) -> Option<usize> {
        (self.n_star > 0).then_some(self.n_star)
    }

    pub fn fixed_arm(&self) -> Option<usize> {
        self.fixed_arm
    }

    pub fn local_t(&self) -> u64 {
        self.local_t
    }
}
