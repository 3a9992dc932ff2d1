use mcb_core::engine::run;
use mcb_core::policies::{MegaParams, NoArmRule};
use mcb_core::schedule::{
    apply_overrides, preset, AlgoKind, Algorithm, ArmsSpec, DmcParams, Event, EventKind, LeaveSelector, McParams,
    PresetName, PresetOptions, Scenario,
};
use mcb_core::RewardModel;
use proptest::prelude::*;

fn arms() -> impl Strategy<Value = ArmsSpec> {
    let rewards = prop_oneof![Just(RewardModel::Bernoulli), Just(RewardModel::Deterministic)];
    prop_oneof![
        (prop::collection::vec(0.0..=1.0f64, 2..8), rewards.clone()).prop_map(|(m, r)| ArmsSpec::explicit(m, r)),
        (2usize..12, 0.0..0.1f64, any::<u64>(), rewards).prop_map(|(k, g, s, r)| ArmsSpec::random(k, g, s, r)),
    ]
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        (1u64..100, prop::option::of(1u64..10_000)).prop_map(|(t0, t1)| Algorithm::Mc(McParams { t0, t1 })),
        (1u64..100, 1u64..1000).prop_map(|(t0, d)| Algorithm::Dmc(DmcParams { t0, t1: t0 + d })),
        (0.01..1.0f64, 0.01..0.99f64, 0.0..0.99f64, 0.01..0.99f64, 0.01..0.99f64, any::<bool>()).prop_map(
            |(c, d, alpha, p0, beta, random)| {
                let no_arm = if random { NoArmRule::Random } else { NoArmRule::Abstain };
                Algorithm::Mega(MegaParams { c, d, alpha, p0, beta, no_arm })
            }
        ),
        Just(Algorithm::Random),
    ]
}

fn event() -> impl Strategy<Value = Event> {
    let who = prop_oneof![
        Just(LeaveSelector::Oldest),
        Just(LeaveSelector::Newest),
        Just(LeaveSelector::Random),
        (0u32..10).prop_map(LeaveSelector::Id),
    ];
    prop_oneof![(1u64..1000).prop_map(Event::enter), (1u64..1000, who).prop_map(|(r, w)| Event::leave(r, w))]
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        arms(),
        1u64..1000,
        algorithm(),
        0usize..5,
        prop::collection::vec(event(), 0..6),
        prop::collection::vec(any::<u64>(), 0..4),
    )
        .prop_map(|(arms, horizon, algorithm, initial_players, mut events, seeds)| {
            events.sort_by_key(|e| e.round);
            Scenario { arms, horizon, algorithm, initial_players, events, seeds }
        })
}

proptest! {
    #[test]
    fn scenario_files_round_trip(s in scenario()) {
        let text = s.to_json_pretty();
        prop_assert_eq!(Scenario::from_json(&text).unwrap(), s.clone());
        prop_assert_eq!(Scenario::from_value(s.to_value()).unwrap(), s);
    }

    #[test]
    fn horizon_override_only_touches_the_horizon(s in scenario(), h in 1u64..1_000_000) {
        let changed = apply_overrides(&s, &[format!("horizon={h}")]).unwrap();
        prop_assert_eq!(changed, Scenario { horizon: h, ..s });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Within a round, enters always apply before leaves, so listing a
    /// round's enter and leave in either order gives the same run.
    #[test]
    fn same_round_events_replay_in_a_fixed_order(
        rounds in prop::collection::btree_set(2u64..200, 1..5),
        seed in any::<u64>(),
        dmc in any::<bool>(),
    ) {
        let algorithm = if dmc {
            Algorithm::Dmc(DmcParams { t0: 20, t1: 60 })
        } else {
            Algorithm::Mega(MegaParams { c: 0.1, d: 0.2, alpha: 0.5, p0: 0.6, beta: 2.0 / 3.0, no_arm: NoArmRule::Abstain })
        };
        let pairs: Vec<(Event, Event)> =
            rounds.iter().map(|&r| (Event::enter(r), Event::leave(r, LeaveSelector::Random))).collect();
        let build = |leave_first: bool| Scenario {
            arms: ArmsSpec::explicit(vec![0.9, 0.6, 0.4, 0.2, 0.1], RewardModel::Bernoulli),
            horizon: 200,
            algorithm,
            initial_players: 2,
            events: pairs.iter().flat_map(|&(e, l)| if leave_first { [l, e] } else { [e, l] }).collect(),
            seeds: vec![],
        };
        let (a, b) = (build(false), build(true));
        prop_assert!(a.validate().is_ok() && b.validate().is_ok());
        prop_assert_eq!(run(&a, seed).unwrap(), run(&b, seed).unwrap());
    }
}

#[test]
fn preset_schedules_are_sorted_and_inside_the_horizon() {
    for name in PresetName::ALL {
        for algo in [AlgoKind::Dmc, AlgoKind::Mega] {
            let s =
                preset(name, &PresetOptions { horizon: Some(40_000), algo: Some(algo), ..Default::default() }).unwrap();
            assert!(s.events.windows(2).all(|w| w[0].round <= w[1].round), "{name}");
            assert!(s.events.iter().all(|e| (1..=s.horizon).contains(&e.round)), "{name}");
            let leaves = s.events.iter().filter(|e| matches!(e.kind, EventKind::Leave(_))).count();
            assert!(leaves <= s.initial_players + s.events.len() - leaves, "{name}");
        }
    }
}
