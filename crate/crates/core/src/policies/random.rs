use rand::Rng;

use super::PolicyAction;

/// Uniform choice over all arms every round.
#[derive(Clone, Debug)]
pub struct RandomPolicy {
    k: usize,
}

impl RandomPolicy {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need at least one arm");
        Self { k }
    }

    pub fn act<R: Rng + ?Sized>(&self, rng: &mut R) -> PolicyAction {
        PolicyAction { arm: rng.gen_range(0..self.k) }
    }
}
