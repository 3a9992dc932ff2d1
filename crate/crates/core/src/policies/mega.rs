//! MEGA: epsilon-greedy exploration with an ALOHA-style collision backoff.
//!
//! Each player keeps a persistence probability `p`. After a collision she
//! stays on the arm with probability `p`; otherwise she marks the arm
//! unavailable until a round drawn uniformly from `{t, ..., t + ceil(t^beta)}`
//! and picks again. `p` moves to `p * alpha + (1 - alpha)` for every round on
//! the same arm as the round before, provided that earlier pull was
//! collision-free; staying after a collision leaves `p` as it is, and a
//! switch resets it to `p0`.
//! The exploration probability at player-local round `t` is
//! `min(1, c K^2 / (d^2 (K - 1) t))`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Feedback, PolicyAction, PolicyError};

/// What a player does when every arm is marked unavailable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoArmRule {
    /// Sit the round out.
    #[default]
    Abstain,
    /// Pull a uniformly random arm anyway.
    Random,
}

fn default_beta() -> f64 {
    2.0 / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MegaParams {
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub p0: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub no_arm: NoArmRule,
}

impl MegaParams {
    pub fn check(&self) -> Result<(), PolicyError> {
        let bad = |what: &str| Err(PolicyError::InvalidConfig(what.to_string()));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("MEGA c must be > 0");
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            return bad("MEGA d must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return bad("MEGA alpha must lie in [0, 1)");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("MEGA beta must lie in (0, 1)");
        }
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return bad("MEGA p0 must lie in (0, 1)");
        }
        Ok(())
    }

    /// `min(1, c K^2 / (d^2 (K - 1) t))` for local round `t >= 1`.
    pub fn exploration_probability(&self, k: usize, t: u64) -> f64 {
        let k = k as f64;
        (self.c * k * k / (self.d * self.d * (k - 1.0) * t as f64)).min(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct MegaState {
    k: usize,
    params: MegaParams,
    clean_pulls: Vec<u64>,
    means: Vec<f64>,
    p: f64,
    /// Arm `i` is excluded while `local_t < unavailable_until[i]`.
    unavailable_until: Vec<u64>,
    local_t: u64,
    prev_arm: Option<usize>,
    pending: Option<Feedback>,
    awaiting_feedback: bool,
    available: Vec<usize>,
}

impl MegaState {
    pub fn new(k: usize, params: MegaParams) -> Result<Self, PolicyError> {
        params.check()?;
        if k < 2 {
            return Err(PolicyError::InvalidConfig(format!("MEGA needs k >= 2, got {k}")));
        }
        Ok(Self {
            k,
            params,
            clean_pulls: vec![0; k],
            means: vec![0.0; k],
            p: params.p0,
            unavailable_until: vec![0; k],
            local_t: 0,
            prev_arm: None,
            pending: None,
            awaiting_feedback: false,
            available: Vec::with_capacity(k),
        })
    }

    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<PolicyAction>, PolicyError> {
        if self.awaiting_feedback {
            return Err(PolicyError::MissingFeedback);
        }
        self.local_t += 1;
        let t = self.local_t;
        let feedback = self.pending.take();
        let collided = feedback.is_some_and(|fb| fb.collided);
        let arm = match (self.prev_arm, feedback) {
            (Some(arm), Some(fb)) if fb.collided => {
                if rng.gen::<f64>() < self.p {
                    Some(arm)
                } else {
                    let window = (t as f64).powf(self.params.beta).ceil() as u64;
                    self.unavailable_until[arm] = t + rng.gen_range(0..=window);
                    self.choose(t, rng)
                }
            }
            _ => self.choose(t, rng),
        };
        self.p = match arm {
            Some(a) if self.prev_arm == Some(a) && collided => self.p,
            Some(a) if self.prev_arm == Some(a) => self.p * self.params.alpha + (1.0 - self.params.alpha),
            _ => self.params.p0,
        };
        self.prev_arm = arm;
        self.awaiting_feedback = arm.is_some();
        Ok(arm.map(|arm| PolicyAction { arm }))
    }

    fn choose<R: Rng + ?Sized>(&mut self, t: u64, rng: &mut R) -> Option<usize> {
        self.available.clear();
        self.available.extend((0..self.k).filter(|&i| t >= self.unavailable_until[i]));
        if self.available.is_empty() {
            return match self.params.no_arm {
                NoArmRule::Abstain => None,
                NoArmRule::Random => Some(rng.gen_range(0..self.k)),
            };
        }
        if rng.gen::<f64>() < self.params.exploration_probability(self.k, t) {
            return Some(self.available[rng.gen_range(0..self.available.len())]);
        }
        let mut best = self.available[0];
        for &i in &self.available[1..] {
            if self.means[i] > self.means[best] {
                best = i;
            }
        }
        Some(best)
    }

    pub fn observe(&mut self, feedback: Feedback) -> Result<(), PolicyError> {
        if !self.awaiting_feedback {
            return Err(PolicyError::UnexpectedFeedback);
        }
        self.awaiting_feedback = false;
        let arm = self.prev_arm.expect("pending pull has an arm");
        if !feedback.collided {
            self.clean_pulls[arm] += 1;
            let n = self.clean_pulls[arm] as f64;
            self.means[arm] += (feedback.reward - self.means[arm]) / n;
        }
        self.pending = Some(feedback);
        Ok(())
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        feedback: Option<Feedback>,
        rng: &mut R,
    ) -> Result<Option<PolicyAction>, PolicyError> {
        if let Some(fb) = feedback {
            self.observe(fb)?;
        }
        self.act(rng)
    }

    pub fn persistence(&self) -> f64 {
        self.p
    }

    pub fn empirical_means(&self) -> &[f64] {
        &self.means
    }

    pub fn unavailable_until(&self) -> &[u64] {
        &self.unavailable_until
    }

    pub fn local_t(&self) -> u64 {
        self.local_t
    }

    pub fn params(&self) -> &MegaParams {
        &self.params
    }
}
