//! JSON scenario files.
//!
//! ```json
//! {
//!   "arms": {"means": [0.9, 0.5, 0.1], "rewards": "bernoulli"},
//!   "horizon": 50000,
//!   "algorithm": {"name": "mc", "params": {"t0": 3000}},
//!   "initial_players": 2,
//!   "events": [
//!     {"round": 20000, "kind": "enter"},
//!     {"round": 30000, "kind": "leave", "who": "random"}
//!   ],
//!   "seeds": [0, 1, 2]
//! }
//! ```
//!
//! `arms` holds exactly one of `means` or
//! `random: {"k": K, "min_gap": g, "seed": s}`; `rewards` is `bernoulli`
//! (default) or `deterministic`. `who` is one of `"oldest"`, `"newest"`,
//! `"random"` or `{"id": n}` and is required for leave events only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Algorithm, ArmsSpec, Event, EventKind, LeaveSelector, MeanSource, RandomMeans, Scenario};
use crate::env::RewardModel;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArmsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    random: Option<RandomMeans>,
    #[serde(default)]
    rewards: RewardModel,
}

impl TryFrom<ArmsFile> for ArmsSpec {
    type Error = String;

    fn try_from(f: ArmsFile) -> Result<Self, String> {
        let source = match (f.means, f.random) {
            (Some(m), None) => MeanSource::Explicit(m),
            (None, Some(r)) => MeanSource::Random(r),
            _ => return Err("arms needs exactly one of `means` or `random`".into()),
        };
        Ok(ArmsSpec { source, rewards: f.rewards })
    }
}

impl From<&ArmsSpec> for ArmsFile {
    fn from(a: &ArmsSpec) -> Self {
        let (means, random) = match &a.source {
            MeanSource::Explicit(m) => (Some(m.clone()), None),
            MeanSource::Random(r) => (None, Some(*r)),
        };
        ArmsFile { means, random, rewards: a.rewards }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindFile {
    Enter,
    Leave,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventFile {
    round: u64,
    kind: KindFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    who: Option<LeaveSelector>,
}

impl TryFrom<EventFile> for Event {
    type Error = String;

    fn try_from(f: EventFile) -> Result<Self, String> {
        let kind = match (f.kind, f.who) {
            (KindFile::Enter, None) => EventKind::Enter,
            (KindFile::Enter, Some(_)) => return Err(format!("enter event at round {} takes no `who`", f.round)),
            (KindFile::Leave, Some(who)) => EventKind::Leave(who),
            (KindFile::Leave, None) => return Err(format!("leave event at round {} needs `who`", f.round)),
        };
        Ok(Event { round: f.round, kind })
    }
}

impl From<&Event> for EventFile {
    fn from(e: &Event) -> Self {
        match e.kind {
            EventKind::Enter => EventFile { round: e.round, kind: KindFile::Enter, who: None },
            EventKind::Leave(who) => EventFile { round: e.round, kind: KindFile::Leave, who: Some(who) },
        }
    }
}

/// On-disk shape of a [`Scenario`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    arms: ArmsFile,
    horizon: u64,
    algorithm: Algorithm,
    initial_players: usize,
    #[serde(default)]
    events: Vec<EventFile>,
    #[serde(default)]
    seeds: Vec<u64>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = String;

    fn try_from(f: ScenarioFile) -> Result<Self, String> {
        Ok(Scenario {
            arms: f.arms.try_into()?,
            horizon: f.horizon,
            algorithm: f.algorithm,
            initial_players: f.initial_players,
            events: f.events.into_iter().map(Event::try_from).collect::<Result<_, _>>()?,
            seeds: f.seeds,
        })
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            arms: (&s.arms).into(),
            horizon: s.horizon,
            algorithm: s.algorithm,
            initial_players: s.initial_players,
            events: s.events.iter().map(EventFile::from).collect(),
            seeds: s.seeds.clone(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Self::from_value(serde_json::from_str(text)?)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, ConfigError> {
        let file: ScenarioFile = serde_json::from_value(value)?;
        Scenario::try_from(file).map_err(|msg| ConfigError::Json(serde::de::Error::custom(msg)))
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::{MegaParams, NoArmRule};
    use crate::schedule::{DmcParams, McParams};

    #[test]
    fn parses_documented_example() {
        let text = r#"{
          "arms": {"means": [0.9, 0.5, 0.1], "rewards": "bernoulli"},
          "horizon": 50000,
          "algorithm": {"name": "mc", "params": {"t0": 3000}},
          "initial_players": 2,
          "events": [
            {"round": 20000, "kind": "enter"},
            {"round": 30000, "kind": "leave", "who": "random"},
            {"round": 40000, "kind": "leave", "who": {"id": 0}}
          ],
          "seeds": [0, 1, 2]
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.algorithm, Algorithm::Mc(McParams { t0: 3000, t1: None }));
        assert_eq!(s.events[1], Event::leave(30000, LeaveSelector::Random));
        assert_eq!(s.events[2], Event::leave(40000, LeaveSelector::Id(0)));
        assert_eq!(Scenario::from_value(s.to_value()).unwrap(), s);
    }

    #[test]
    fn algorithm_forms() {
        let random: Algorithm = serde_json::from_str(r#"{"name": "random"}"#).unwrap();
        assert_eq!(random, Algorithm::Random);
        let dmc: Algorithm = serde_json::from_str(r#"{"name": "dmc", "params": {"t0": 5, "t1": 9}}"#).unwrap();
        assert_eq!(dmc, Algorithm::Dmc(DmcParams { t0: 5, t1: 9 }));
        let mega: Algorithm =
            serde_json::from_str(r#"{"name": "mega", "params": {"c": 0.1, "d": 0.05, "alpha": 0.5, "p0": 0.6}}"#)
                .unwrap();
        let Algorithm::Mega(MegaParams { beta, no_arm, .. }) = mega else { panic!() };
        assert!((beta - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(no_arm, NoArmRule::Abstain);
        // c, d, alpha and p0 have no defaults
        assert!(serde_json::from_str::<Algorithm>(r#"{"name": "mega", "params": {"c": 0.1}}"#).is_err());
    }

    #[test]
    fn rejects_malformed_files() {
        let ok = r#"{"arms": {"random": {"k": 10, "min_gap": 0.05, "seed": 1}}, "horizon": 10,
                     "algorithm": {"name": "random"}, "initial_players": 1}"#;
        assert!(Scenario::from_json(ok).is_ok());
        for bad in [
            r#"{"arms": {"means": [0.5, 0.5], "random": {"k": 2, "min_gap": 0, "seed": 1}}, "horizon": 10, "algorithm": {"name": "random"}, "initial_players": 1}"#,
            r#"{"arms": {}, "horizon": 10, "algorithm": {"name": "random"}, "initial_players": 1}"#,
            r#"{"arms": {"means": [0.5, 0.5]}, "horizon": 10, "algorithm": {"name": "ucb"}, "initial_players": 1}"#,
            r#"{"arms": {"means": [0.5, 0.5]}, "horizon": 10, "algorithm": {"name": "random"}, "initial_players": 1, "extra": 1}"#,
            r#"{"arms": {"means": [0.5, 0.5]}, "horizon": 10, "algorithm": {"name": "random"}, "initial_players": 1, "events": [{"round": 3, "kind": "leave"}]}"#,
            r#"{"arms": {"means": [0.5, 0.5]}, "horizon": 10, "algorithm": {"name": "random"}, "initial_players": 1, "events": [{"round": 3, "kind": "enter", "who": "oldest"}]}"#,
            r#"{"arms": {"means": [0.5, 0.5]}, "horizon": -1, "algorithm": {"name": "random"}, "initial_players": 1}"#,
        ] {
            assert!(Scenario::from_json(bad).is_err(), "{bad}");
        }
    }
}
