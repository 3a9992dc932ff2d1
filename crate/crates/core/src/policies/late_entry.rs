use rand::Rng;

use super::{Feedback, PolicyAction, PolicyError};

/// Behaviour of a DMC player that joined in the middle of an epoch.
///
/// Arm `i` is drawn with probability proportional to
/// `mean_i * clean_rate_i`, where both factors start at 1 and are replaced
/// by the player's own statistics once the arm has been tried.
#[derive(Clone, Debug)]
pub struct LateEntryState {
    pulls: Vec<u64>,
    collisions: Vec<u64>,
    clean_pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    last_arm: Option<usize>,
    awaiting_feedback: bool,
}

impl LateEntryState {
    pub fn new(k: usize) -> Self {
        Self {
            pulls: vec![0; k],
            collisions: vec![0; k],
            clean_pulls: vec![0; k],
            reward_sums: vec![0.0; k],
            last_arm: None,
            awaiting_feedback: false,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.pulls.len()).map(|i| self.weight(i)).collect()
    }

    fn weight(&self, arm: usize) -> f64 {
        let mean = match self.clean_pulls[arm] {
            0 => 1.0,
            n => self.reward_sums[arm] / n as f64,
        };
        let clean_rate = match self.pulls[arm] {
            0 => 1.0,
            n => (n - self.collisions[arm]) as f64 / n as f64,
        };
        mean * clean_rate
    }

    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<PolicyAction, PolicyError> {
        if self.awaiting_feedback {
            return Err(PolicyError::MissingFeedback);
        }
        let k = self.pulls.len();
        let total: f64 = (0..k).map(|i| self.weight(i)).sum();
        let arm = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for i in 0..k {
                let w = self.weight(i);
                if w <= 0.0 {
                    continue;
                }
                pick = Some(i);
                if target < w {
                    break;
                }
                target -= w;
            }
            pick.expect("positive total has a positive weight")
        } else {
            rng.gen_range(0..k)
        };
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
        self.pulls[arm] += 1;
        if feedback.collided {
            self.collisions[arm] += 1;
        } else {
            self.clean_pulls[arm] += 1;
            self.reward_sums[arm] += feedback.reward;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn pull(state: &mut LateEntryState, arm: usize, fb: Feedback) {
        state.last_arm = Some(arm);
        state.awaiting_feedback = true;
        state.observe(fb).unwrap();
    }

    fn frequencies(state: &mut LateEntryState, n: usize) -> Vec<f64> {
        let mut rng = stream(21, Stream::Player(0));
        let mut counts = vec![0usize; state.pulls.len()];
        for _ in 0..n {
            counts[state.act(&mut rng).unwrap().arm] += 1;
            state.awaiting_feedback = false;
        }
        counts.into_iter().map(|c| c as f64 / n as f64).collect()
    }

    #[test]
    fn starts_uniform() {
        let mut s = LateEntryState::new(4);
        assert_eq!(s.weights(), vec![1.0; 4]);
        for f in frequencies(&mut s, 100_000) {
            assert!((f - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn always_collided_arm_is_never_chosen() {
        let mut s = LateEntryState::new(3);
        for _ in 0..10 {
            pull(&mut s, 1, Feedback { collided: true, reward: 0.0 });
        }
        pull(&mut s, 0, Feedback { collided: false, reward: 1.0 });
        assert_eq!(s.weights()[1], 0.0);
        assert_eq!(frequencies(&mut s, 20_000)[1], 0.0);
    }

    #[test]
    fn proportional_to_weights() {
        let mut s = LateEntryState::new(3);
        pull(&mut s, 0, Feedback { collided: false, reward: 0.5 });
        pull(&mut s, 1, Feedback { collided: false, reward: 0.5 });
        pull(&mut s, 2, Feedback { collided: true, reward: 0.0 });
        assert_eq!(s.weights(), vec![0.5, 0.5, 0.0]);
        let f = frequencies(&mut s, 100_000);
        assert_eq!(f[2], 0.0);
        assert!((f[0] - 0.5).abs() < 0.01 && (f[1] - 0.5).abs() < 0.01);
    }

    #[test]
    fn zero_weights_fall_back_to_uniform() {
        let mut s = LateEntryState::new(2);
        pull(&mut s, 0, Feedback { collided: false, reward: 0.0 });
        pull(&mut s, 1, Feedback { collided: true, reward: 0.0 });
        assert_eq!(s.weights(), vec![0.0, 0.0]);
        let f = frequencies(&mut s, 100_000);
        assert!((f[0] - 0.5).abs() < 0.01);
    }
}
