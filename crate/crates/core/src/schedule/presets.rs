//! Named experiment scenarios.
//!
//! | name               | arms                          | players                                   |
//! |--------------------|-------------------------------|-------------------------------------------|
//! | `static`           | 10 random Bernoulli, gap 0.05 | 6, no churn, T = 50 000                    |
//! | `theorem3`         | 4 deterministic, gap 0.8      | 1, one enters at T/3, player 0 leaves at 2T/3 |
//! | `theorem3-theorem` | 2 deterministic, gap 0.8      | 1, one enters at T/2, player 0 leaves at T/2 + fT |
//! | `theorem3-general` | 10 deterministic, gap 0.7     | 1, entries every T^0.84 up to 4, then player 0 leaves |
//! | `theorem4`         | 10 random Bernoulli, gap 0.05 | 5, a random leave and an entry alternating every T^lambda |
//!
//! All presets use `T0 = 3000`. MEGA runs use `c = 0.1`, `alpha = 0.5`,
//! `p0 = 0.6`, `beta = 2/3` and `d` equal to the smallest gap between the
//! `N`-th and `(N+1)`-th arm over the player counts of the run.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Algorithm, ArmsSpec, DmcParams, Event, LeaveSelector, McParams, Scenario};
use crate::bounds::{fixing_time_bound, mega_failure_f_band, t1_optimal};
use crate::env::{EnvError, RewardModel};
use crate::policies::{MegaParams, NoArmRule};

pub const PRESET_T0: u64 = 3000;

const STATIC_MEANS_SEED: u64 = 7;
const CHURN_MEANS_SEED: u64 = 11;
const PRESET_SEEDS: u64 = 20;

const MEGA_C: f64 = 0.1;
const MEGA_ALPHA: f64 = 0.5;
const MEGA_P0: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetName {
    Static,
    Theorem3,
    Theorem3Theorem,
    Theorem3General,
    Theorem4,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Static,
        PresetName::Theorem3,
        PresetName::Theorem3Theorem,
        PresetName::Theorem3General,
        PresetName::Theorem4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Static => "static",
            PresetName::Theorem3 => "theorem3",
            PresetName::Theorem3Theorem => "theorem3-theorem",
            PresetName::Theorem3General => "theorem3-general",
            PresetName::Theorem4 => "theorem4",
        }
    }

    /// Comma-separated list of every preset name.
    pub fn list() -> String {
        Self::ALL.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
    }

    fn default_algo(self) -> AlgoKind {
        match self {
            PresetName::Static => AlgoKind::Mc,
            _ => AlgoKind::Dmc,
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = PresetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| PresetError::Unknown(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgoKind {
    Mc,
    Dmc,
    Mega,
    Random,
}

impl FromStr for AlgoKind {
    type Err = PresetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mc" => Ok(AlgoKind::Mc),
            "dmc" => Ok(AlgoKind::Dmc),
            "mega" => Ok(AlgoKind::Mega),
            "random" => Ok(AlgoKind::Random),
            _ => Err(PresetError::UnknownAlgorithm(s.to_string())),
        }
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoKind::Mc => "mc",
            AlgoKind::Dmc => "dmc",
            AlgoKind::Mega => "mega",
            AlgoKind::Random => "random",
        })
    }
}

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset `{0}`; available presets: {list}", list = PresetName::list())]
    Unknown(String),
    #[error("unknown algorithm `{0}`; expected mc, dmc, mega or random")]
    UnknownAlgorithm(String),
    #[error("invalid preset option: {0}")]
    Option(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Knobs shared by the presets. `None` means the preset's default.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PresetOptions {
    pub horizon: Option<u64>,
    /// Overlap fraction of the `theorem3-theorem` variant.
    pub f: Option<f64>,
    /// Churn exponent of `theorem4` and `theorem3-general`.
    pub lambda: Option<f64>,
    pub algo: Option<AlgoKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem3Variant {
    /// Entry at `ceil(T/3)`, leave at `ceil(2T/3)`, four arms.
    Figure,
    /// Entry at `ceil(T/2)`, leave at `ceil(T/2 + fT)`, two arms.
    Theorem,
}

pub fn preset(name: PresetName, opts: &PresetOptions) -> Result<Scenario, PresetError> {
    let algo = opts.algo.unwrap_or(name.default_algo());
    match name {
        PresetName::Static => preset_static(opts.horizon.unwrap_or(50_000), algo),
        PresetName::Theorem3 => preset_theorem3(opts.horizon.unwrap_or(500_000), 0.0, Theorem3Variant::Figure, algo),
        PresetName::Theorem3Theorem => {
            preset_theorem3(opts.horizon.unwrap_or(500_000), opts.f.unwrap_or(0.1), Theorem3Variant::Theorem, algo)
        }
        PresetName::Theorem3General => {
            preset_theorem3_general(opts.horizon.unwrap_or(500_000), opts.lambda.unwrap_or(0.84), algo)
        }
        PresetName::Theorem4 => preset_theorem4(opts.horizon.unwrap_or(500_000), opts.lambda.unwrap_or(0.84), algo),
    }
}

/// Six players on ten random Bernoulli arms, no churn.
pub fn preset_static(horizon: u64, algo: AlgoKind) -> Result<Scenario, PresetError> {
    check_horizon(horizon)?;
    let mut s = Scenario {
        arms: ArmsSpec::random(10, 0.05, STATIC_MEANS_SEED, RewardModel::Bernoulli),
        horizon,
        algorithm: Algorithm::Random,
        initial_players: 6,
        events: vec![],
        seeds: (0..PRESET_SEEDS).collect(),
    };
    s.algorithm = algorithm(algo, &s, horizon.max(PRESET_T0 + 1))?;
    Ok(s)
}

/// One player alone, a second one enters, then the first one leaves.
pub fn preset_theorem3(
    horizon: u64,
    f: f64,
    variant: Theorem3Variant,
    algo: AlgoKind,
) -> Result<Scenario, PresetError> {
    check_horizon(horizon)?;
    let t = horizon as f64;
    let (means, enter, leave, t1) = match variant {
        Theorem3Variant::Figure => {
            let t1 = if horizon == 500_000 { 34_757 } else { default_t1(horizon, 4, 2) };
            (vec![1.0, 0.9, 0.1, 0.0], (t / 3.0).ceil(), (2.0 * t / 3.0).ceil(), t1)
        }
        Theorem3Variant::Theorem => {
            if !(f > 0.0 && f < 0.5) {
                return Err(PresetError::Option(format!("f = {f} must lie in (0, 0.5)")));
            }
            (vec![0.9, 0.1], (t / 2.0).ceil(), (t / 2.0 + f * t).ceil(), default_t1(horizon, 2, 2))
        }
    };
    let mut s = Scenario {
        arms: ArmsSpec::explicit(means, RewardModel::Deterministic),
        horizon,
        algorithm: Algorithm::Random,
        initial_players: 1,
        events: vec![Event::enter(enter as u64), Event::leave(leave as u64, LeaveSelector::Id(0))],
        seeds: (0..PRESET_SEEDS).collect(),
    };
    if variant == Theorem3Variant::Figure {
        shift_out_of_learning(&mut s.events, t1, horizon);
    }
    s.algorithm = algorithm_with_gap(algo, t1, 0.8)?;
    Ok(s)
}

/// One player, then an entry every `ceil(T^lambda)` rounds until four are
/// active, then player 0 leaves one spacing later.
pub fn preset_theorem3_general(horizon: u64, lambda: f64, algo: AlgoKind) -> Result<Scenario, PresetError> {
    check_horizon(horizon)?;
    let spacing = spacing(horizon, lambda)?;
    let t1 = if horizon == 500_000 { 167_845 } else { default_t1(horizon, 10, 4) };
    let mut events: Vec<Event> = (1..=3).map(|i| Event::enter(i * spacing)).collect();
    events.push(Event::leave(4 * spacing, LeaveSelector::Id(0)));
    events.retain(|e| e.round <= horizon);
    let mut s = Scenario {
        arms: ArmsSpec::explicit(
            vec![0.95, 0.9, 0.85, 0.8, 0.1, 0.08, 0.06, 0.04, 0.02, 0.0],
            RewardModel::Deterministic,
        ),
        horizon,
        algorithm: Algorithm::Random,
        initial_players: 1,
        events,
        seeds: (0..PRESET_SEEDS).collect(),
    };
    shift_out_of_learning(&mut s.events, t1, horizon);
    s.algorithm = algorithm_with_gap(algo, t1, 0.7)?;
    Ok(s)
}

/// Five players on ten random Bernoulli arms. Every `ceil(T^lambda)`
/// rounds a random active player leaves or a new player enters, starting
/// with a leave.
pub fn preset_theorem4(horizon: u64, lambda: f64, algo: AlgoKind) -> Result<Scenario, PresetError> {
    check_horizon(horizon)?;
    let spacing = spacing(horizon, lambda)?;
    let events: Vec<Event> = (1..=horizon / spacing)
        .map(|i| {
            let round = i * spacing;
            if i % 2 == 1 {
                Event::leave(round, LeaveSelector::Random)
            } else {
                Event::enter(round)
            }
        })
        .collect();
    let t1 = match horizon {
        500_000 => 32_482,
        6_000_000 => 119_921,
        _ => default_t1(horizon, 10, events.len() as u64),
    };
    let mut s = Scenario {
        arms: ArmsSpec::random(10, 0.05, CHURN_MEANS_SEED, RewardModel::Bernoulli),
        horizon,
        algorithm: Algorithm::Random,
        initial_players: 5,
        events,
        seeds: (0..PRESET_SEEDS).collect(),
    };
    shift_out_of_learning(&mut s.events, t1, horizon);
    s.algorithm = algorithm(algo, &s, t1)?;
    Ok(s)
}

/// Warnings about preset options outside the range the scenario is meant
/// for.
pub fn preset_warnings(name: PresetName, opts: &PresetOptions) -> Vec<String> {
    let mut out = Vec::new();
    if name == PresetName::Theorem3Theorem {
        let horizon = opts.horizon.unwrap_or(500_000);
        let f = opts.f.unwrap_or(0.1);
        let (lo, hi) = mega_failure_f_band(MEGA_C, 0.8, 2, horizon);
        if f < lo || f > hi {
            out.push(format!("f = {f} is outside [{lo:.6}, {hi:.6}], where the MEGA failure is expected"));
        }
    }
    if matches!(name, PresetName::Theorem4 | PresetName::Theorem3General) {
        let lambda = opts.lambda.unwrap_or(0.84);
        if lambda <= 2.0 / 3.0 {
            out.push(format!("lambda = {lambda} does not exceed beta = 2/3; MEGA is not expected to fall behind"));
        }
    }
    out
}

fn check_horizon(horizon: u64) -> Result<(), PresetError> {
    if horizon < 2 {
        return Err(PresetError::Option(format!("horizon {horizon} is too short")));
    }
    Ok(())
}

fn spacing(horizon: u64, lambda: f64) -> Result<u64, PresetError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(PresetError::Option(format!("lambda = {lambda} must lie in (0, 1]")));
    }
    Ok(((horizon as f64).powf(lambda).ceil() as u64).max(1))
}

/// Epoch length for `churn` events with the fixing time bounded through K.
fn default_t1(horizon: u64, k: usize, churn: u64) -> u64 {
    if horizon <= PRESET_T0 {
        return PRESET_T0 + 1;
    }
    t1_optimal(horizon, PRESET_T0, fixing_time_bound(k as f64), churn).expect("horizon exceeds t0")
}

/// Moves events that land inside a DMC learning window to the first round
/// after it, so churn only happens while players are settled.
fn shift_out_of_learning(events: &mut Vec<Event>, t1: u64, horizon: u64) {
    for e in events.iter_mut() {
        let offset = (e.round - 1) % t1;
        if offset < PRESET_T0 {
            e.round += PRESET_T0 - offset;
        }
    }
    events.retain(|e| e.round <= horizon);
}

fn algorithm(algo: AlgoKind, s: &Scenario, t1: u64) -> Result<Algorithm, PresetError> {
    let d = if algo == AlgoKind::Mega { min_gap(s)? } else { 0.5 };
    algorithm_with_gap(algo, t1, d)
}

fn algorithm_with_gap(algo: AlgoKind, t1: u64, d: f64) -> Result<Algorithm, PresetError> {
    Ok(match algo {
        AlgoKind::Mc => Algorithm::Mc(McParams { t0: PRESET_T0, t1: None }),
        AlgoKind::Dmc => Algorithm::Dmc(DmcParams { t0: PRESET_T0, t1: t1.max(PRESET_T0 + 1) }),
        AlgoKind::Mega => Algorithm::Mega(MegaParams {
            c: MEGA_C,
            d,
            alpha: MEGA_ALPHA,
            p0: MEGA_P0,
            beta: 2.0 / 3.0,
            no_arm: NoArmRule::Abstain,
        }),
        AlgoKind::Random => Algorithm::Random,
    })
}

/// Smallest gap below the `N`-th best arm over every player count `N`
/// reached in the scenario.
fn min_gap(s: &Scenario) -> Result<f64, PresetError> {
    let arms = s.arm_set()?;
    let gap = s.player_counts().into_iter().filter_map(|n| arms.gap_below(n)).fold(f64::INFINITY, f64::min);
    Ok(if gap.is_finite() && gap > 0.0 { gap.min(0.99) } else { 0.05 })
}
