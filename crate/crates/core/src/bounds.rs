//! Closed-form parameter choices and regret bounds.
//!
//! All logarithms are natural. Each formula is split into its named terms so
//! callers (and the CLI) can show where a value comes from.

use std::f64::consts::E;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("delta must lie in (0, 1), got {0}")]
    Delta(f64),
    #[error("need at least 2 arms, got {0}")]
    Arms(usize),
    #[error("horizon {horizon} is shorter than T0 = {t0}")]
    HorizonBelowT0 { horizon: u64, t0: u64 },
    #[error("{name} must be {requirement}, got {value}")]
    Range { name: &'static str, requirement: &'static str, value: f64 },
}

fn check_common(k: usize, epsilon: f64, delta: f64) -> Result<(), BoundsError> {
    if k < 2 {
        return Err(BoundsError::Arms(k));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BoundsError::Epsilon(epsilon));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::Delta(delta));
    }
    Ok(())
}

/// The three competing requirements on the learning length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T0Terms {
    /// Enough clean observations of every arm.
    pub observations: f64,
    /// An epsilon-correct ranking.
    pub ranking: f64,
    /// A correct player-count estimate.
    pub estimation: f64,
}

impl T0Terms {
    pub fn rounds(&self) -> u64 {
        self.observations.max(self.ranking).max(self.estimation).ceil() as u64
    }
}

/// Learning-length terms for a static game, with the estimator's confidence
/// set to `delta / 2`.
pub fn t0_static_terms(k: usize, epsilon: f64, delta: f64) -> Result<T0Terms, BoundsError> {
    check_common(k, epsilon, delta)?;
    let kf = k as f64;
    let delta_estimator = delta / 2.0;
    Ok(T0Terms {
        observations: kf / 2.0 * (2.0 * kf * kf / delta).ln(),
        ranking: 16.0 * kf / (epsilon * epsilon) * (4.0 * kf * kf / delta).ln(),
        estimation: kf * kf * (2.0 / delta_estimator).ln() / 0.02,
    })
}

pub fn t0_static(k: usize, epsilon: f64, delta: f64) -> Result<u64, BoundsError> {
    Ok(t0_static_terms(k, epsilon, delta)?.rounds())
}

/// Learning-length terms for one DMC epoch over a horizon `horizon`; the
/// per-epoch confidence is `delta / (2T)` so a union bound over all epochs
/// holds.
pub fn t0_dynamic_terms(k: usize, epsilon: f64, delta: f64, horizon: u64) -> Result<T0Terms, BoundsError> {
    check_common(k, epsilon, delta)?;
    if horizon == 0 {
        return Err(BoundsError::Range { name: "T", requirement: ">= 1", value: 0.0 });
    }
    let kf = k as f64;
    let t = horizon as f64;
    let per_epoch = delta / (2.0 * t);
    Ok(T0Terms {
        observations: kf / 2.0 * (2.0 * kf * kf / per_epoch).ln(),
        ranking: 16.0 * kf / (epsilon * epsilon) * (4.0 * kf * kf / per_epoch).ln(),
        estimation: kf * kf * (4.0 * t / delta).ln() / 0.02,
    })
}

pub fn t0_dynamic(k: usize, epsilon: f64, delta: f64, horizon: u64) -> Result<u64, BoundsError> {
    Ok(t0_dynamic_terms(k, epsilon, delta, horizon)?.rounds())
}

/// Rounds of uniform exploration after which the player-count estimate is
/// exact with probability `1 - delta`: `ceil(ln(2/delta) / (2 (0.1/K)^2))`.
pub fn t0_estimation(k: usize, delta: f64) -> Result<u64, BoundsError> {
    if k < 2 {
        return Err(BoundsError::Arms(k));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::Delta(delta));
    }
    let eps1 = 0.1 / k as f64;
    Ok(((2.0 / delta).ln() / (2.0 * eps1 * eps1)).ceil() as u64)
}

/// Bound on the expected rounds a Musical Chairs player needs to fix:
/// `e^2 * n`.
pub fn fixing_time_bound(n: f64) -> f64 {
    E * E * n
}

/// Bound on the expected regret of the Musical Chairs phase: `2 e^2 n^2`.
pub fn musical_chairs_regret_bound(n: f64) -> f64 {
    2.0 * E * E * n * n
}

/// Epoch length balancing restart cost against churn cost:
/// `ceil(sqrt(T (T0 + 2 Tf) / x))`, never below `T0 + 1`. Without churn
/// (`x = 0`) the whole horizon is one epoch.
pub fn t1_optimal(horizon: u64, t0: u64, tf_bound: f64, churn: u64) -> Result<u64, BoundsError> {
    if horizon < t0 {
        return Err(BoundsError::HorizonBelowT0 { horizon, t0 });
    }
    if !(tf_bound >= 0.0 && tf_bound.is_finite()) {
        return Err(BoundsError::Range { name: "Tf", requirement: "finite and >= 0", value: tf_bound });
    }
    if churn == 0 {
        return Ok(horizon);
    }
    let per_epoch_cost = t0 as f64 + 2.0 * tf_bound;
    let t1 = (horizon as f64 * per_epoch_cost / churn as f64).sqrt().ceil() as u64;
    Ok(t1.max(t0 + 1))
}

/// `T0 * N + 2 e^2 N^2`: regret of MC in a static game once learning
/// succeeds. Independent of the horizon.
pub fn mc_regret_bound(t0: u64, n: u64) -> f64 {
    let n = n as f64;
    t0 as f64 * n + musical_chairs_regret_bound(n)
}

/// The three parts of the DMC regret bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmcBoundTerms {
    pub learning_fixing: f64,
    pub entering: f64,
    pub leaving: f64,
}

impl DmcBoundTerms {
    pub fn total(&self) -> f64 {
        self.learning_fixing + self.entering + self.leaving
    }
}

/// Inputs of the DMC regret bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmcBoundInputs {
    pub horizon: u64,
    pub t1: u64,
    pub t0: u64,
    pub tf: f64,
    pub max_players: u64,
    pub entered: u64,
    pub left: u64,
}

/// `(T/T1) Nm (T0 + 2 Tf) + 2 e (T1 - T0) + l (T1 - T0)`.
pub fn dmc_regret_terms(inputs: &DmcBoundInputs) -> Result<DmcBoundTerms, BoundsError> {
    let DmcBoundInputs { horizon, t1, t0, tf, max_players, entered, left } = *inputs;
    if t1 <= t0 {
        return Err(BoundsError::Range { name: "T1", requirement: "> T0", value: t1 as f64 });
    }
    let epochs = horizon as f64 / t1 as f64;
    let tail = (t1 - t0) as f64;
    Ok(DmcBoundTerms {
        learning_fixing: epochs * max_players as f64 * (t0 as f64 + 2.0 * tf),
        entering: entered as f64 * 2.0 * tail,
        leaving: left as f64 * tail,
    })
}

pub fn dmc_regret_bound(inputs: &DmcBoundInputs) -> Result<f64, BoundsError> {
    Ok(dmc_regret_terms(inputs)?.total())
}

/// Regret exponents in the alternating enter/leave scenario with events
/// every `T^lambda` rounds: `(min(1, 1 - (lambda - beta)), 1 - lambda/2)`
/// for MEGA and DMC respectively.
pub fn scenario_exponents(lambda: f64, beta: f64) -> (f64, f64) {
    let mega = (1.0 - (lambda - beta)).min(1.0);
    let dmc = 1.0 - lambda / 2.0;
    (mega, dmc)
}

/// Chance that a given player collides when `n` players pick uniformly
/// among `k` arms: `1 - (1 - 1/k)^(n-1)`.
pub fn collision_probability(k: usize, n: usize) -> f64 {
    assert!(k >= 1 && n >= 1);
    1.0 - (1.0 - 1.0 / k as f64).powi(n as i32 - 1)
}

/// Real-valued player count with collision probability `p`.
pub fn invert_collision_probability(k: usize, p: f64) -> f64 {
    assert!(k >= 2);
    (1.0 - p).ln() / (1.0 - 1.0 / k as f64).ln() + 1.0
}

/// The range of `f` (fraction of the horizon the two players overlap) for
/// which the two-player MEGA failure scenario applies:
/// `[c K^2 / (d^2 (K-1)) / T, d^2 (K-1) / (8 c K^2)]`.
pub fn mega_failure_f_band(c: f64, d: f64, k: usize, horizon: u64) -> (f64, f64) {
    let kf = k as f64;
    let ratio = c * kf * kf / (d * d * (kf - 1.0));
    (ratio / horizon as f64, 1.0 / (8.0 * ratio))
}
