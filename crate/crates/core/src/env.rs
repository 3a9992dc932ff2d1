//! K-armed stochastic environment, collision resolution and the regret oracle.
//!
//! Regret is measured against the best static allocation: with `N_t` active
//! players the benchmark is the sum of the `N_t` largest means, and a player
//! only secures the mean of her arm when nobody else chose it that round.
//! Everything here is computed from the means, never from realized rewards.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type PlayerId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("need at least 2 arms, got {0}")]
    TooFewArms(usize),
    #[error("mean of arm {arm} is {mean}, outside [0, 1]")]
    MeanOutOfRange { arm: usize, mean: f64 },
    #[error("arm index {arm} out of range for {k} arms")]
    ArmOutOfRange { arm: usize, k: usize },
    #[error("player {0} appears more than once in a round")]
    DuplicatePlayer(PlayerId),
    #[error("{active} active players exceed {k} arms")]
    TooManyPlayers { active: usize, k: usize },
    #[error("{pulls} pulls reported for only {active} active players")]
    PullsExceedActive { pulls: usize, active: usize },
    #[error("reward vector has {got} entries for {k} arms")]
    RewardLength { got: usize, k: usize },
    #[error("minimum gap {0} is not attainable")]
    InfeasibleGap(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardModel {
    /// Reward is 1 with probability equal to the mean, else 0.
    #[default]
    Bernoulli,
    /// Reward is the mean itself.
    Deterministic,
}

/// The arms of one environment with their means and the ranking by mean.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmSet {
    means: Vec<f64>,
    model: RewardModel,
    /// Arm indices sorted by mean, descending; ties by ascending index.
    order: Vec<usize>,
    /// `rank[arm]` is the position of `arm` in `order`.
    rank: Vec<usize>,
}

impl ArmSet {
    pub fn new(means: Vec<f64>, model: RewardModel) -> Result<Self, EnvError> {
        if means.len() < 2 {
            return Err(EnvError::TooFewArms(means.len()));
        }
        for (arm, &mean) in means.iter().enumerate() {
            if !(0.0..=1.0).contains(&mean) {
                return Err(EnvError::MeanOutOfRange { arm, mean });
            }
        }
        let order = ranking_by(&means);
        let mut rank = vec![0; means.len()];
        for (pos, &arm) in order.iter().enumerate() {
            rank[arm] = pos;
        }
        Ok(Self { means, model, order, rank })
    }

    /// Draws means uniformly from `[0, 1]` until the gap between the
    /// `n_top`-th and `(n_top + 1)`-th best arm is at least `min_gap`.
    pub fn random_with_gap<R: Rng + ?Sized>(
        k: usize,
        n_top: usize,
        min_gap: f64,
        model: RewardModel,
        rng: &mut R,
    ) -> Result<Self, EnvError> {
        if k < 2 {
            return Err(EnvError::TooFewArms(k));
        }
        if !(0.0..1.0).contains(&min_gap) {
            return Err(EnvError::InfeasibleGap(min_gap));
        }
        const MAX_ATTEMPTS: usize = 1_000_000;
        for _ in 0..MAX_ATTEMPTS {
            let means: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            let set = Self::new(means, model)?;
            if set.gap_below(n_top).is_none_or(|gap| gap >= min_gap) {
                return Ok(set);
            }
        }
        Err(EnvError::InfeasibleGap(min_gap))
    }

    pub fn k(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    pub fn model(&self) -> RewardModel {
        self.model
    }

    /// Arms from best to worst.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rank_of(&self, arm: usize) -> usize {
        self.rank[arm]
    }

    /// The set of the `n` best arms (in ranking order).
    pub fn top(&self, n: usize) -> &[usize] {
        &self.order[..n.min(self.k())]
    }

    /// Sum of the `n` largest means, accumulated in ranking order.
    pub fn top_sum(&self, n: usize) -> f64 {
        self.top(n).iter().map(|&a| self.means[a]).sum()
    }

    /// Gap between the `n`-th and `(n + 1)`-th best means. `None` when
    /// either does not exist.
    pub fn gap_below(&self, n: usize) -> Option<f64> {
        if n == 0 || n >= self.k() {
            return None;
        }
        Some(self.means[self.order[n - 1]] - self.means[self.order[n]])
    }

    /// One reward per arm for the current round.
    pub fn sample_rewards<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.k());
        self.sample_rewards_into(rng, &mut out);
        out
    }

    pub fn sample_rewards_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        match self.model {
            RewardModel::Deterministic => out.extend_from_slice(&self.means),
            RewardModel::Bernoulli => {
                out.extend(self.means.iter().map(|&mu| if rng.gen::<f64>() < mu { 1.0 } else { 0.0 }))
            }
        }
    }
}

/// Indices sorted by value descending, ties by ascending index.
pub fn ranking_by(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlayerOutcome {
    pub player: PlayerId,
    pub arm: usize,
    pub collided: bool,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    pub players: Vec<PlayerOutcome>,
    pub round_regret: f64,
}

/// Resolves one round of simultaneous choices.
///
/// `active_count` is `N_t`: it may exceed `choices.len()` when some active
/// players abstained from pulling.
pub fn resolve_round(
    arms: &ArmSet,
    choices: &[(PlayerId, usize)],
    rewards: &[f64],
    active_count: usize,
) -> Result<RoundOutcome, EnvError> {
    let mut resolver = Resolver::new(arms.k());
    let mut players = Vec::with_capacity(choices.len());
    let round_regret = resolver.resolve(arms, choices, rewards, active_count, &mut players)?;
    Ok(RoundOutcome { players, round_regret })
}

/// `sum of the top-N_t means - sum over players of mu(arm) * (1 - collided)`.
pub fn per_round_regret(arms: &ArmSet, outcomes: &[PlayerOutcome], active_count: usize) -> Result<f64, EnvError> {
    Resolver::new(arms.k()).regret(arms, outcomes, active_count)
}

/// Reusable scratch space for resolving rounds without allocating.
#[derive(Clone, Debug)]
pub struct Resolver {
    counts: Vec<u32>,
    secured: Vec<usize>,
}

impl Resolver {
    pub fn new(k: usize) -> Self {
        Self { counts: vec![0; k], secured: Vec::with_capacity(k) }
    }

    pub fn resolve(
        &mut self,
        arms: &ArmSet,
        choices: &[(PlayerId, usize)],
        rewards: &[f64],
        active_count: usize,
        out: &mut Vec<PlayerOutcome>,
    ) -> Result<f64, EnvError> {
        let k = arms.k();
        if rewards.len() != k {
            return Err(EnvError::RewardLength { got: rewards.len(), k });
        }
        for (i, &(player, arm)) in choices.iter().enumerate() {
            if arm >= k {
                return Err(EnvError::ArmOutOfRange { arm, k });
            }
            if choices[..i].iter().any(|&(p, _)| p == player) {
                return Err(EnvError::DuplicatePlayer(player));
            }
        }
        self.counts.clear();
        self.counts.resize(k, 0);
        for &(_, arm) in choices {
            self.counts[arm] += 1;
        }
        out.clear();
        out.extend(choices.iter().map(|&(player, arm)| {
            let collided = self.counts[arm] >= 2;
            PlayerOutcome { player, arm, collided, reward: if collided { 0.0 } else { rewards[arm] } }
        }));
        self.regret(arms, out, active_count)
    }

    pub fn regret(&mut self, arms: &ArmSet, outcomes: &[PlayerOutcome], active_count: usize) -> Result<f64, EnvError> {
        let k = arms.k();
        if active_count > k {
            return Err(EnvError::TooManyPlayers { active: active_count, k });
        }
        if outcomes.len() > active_count {
            return Err(EnvError::PullsExceedActive { pulls: outcomes.len(), active: active_count });
        }
        // Both sums run in ranking order, so an optimal allocation cancels
        // to exactly zero and every other allocation stays non-negative.
        self.secured.clear();
        self.secured.extend(outcomes.iter().filter(|o| !o.collided).map(|o| arms.rank_of(o.arm)));
        self.secured.sort_unstable();
        let secured: f64 = self.secured.iter().map(|&r| arms.mean(arms.order()[r])).sum();
        let best = arms.top_sum(active_count);
        Ok((best - secured).max(0.0))
    }
}
