use mcb_core::engine::{decompose, run, run_with, RunOptions};
use mcb_core::env::{per_round_regret, PlayerOutcome};
use mcb_core::policies::{MegaParams, NoArmRule};
use mcb_core::schedule::{Algorithm, ArmsSpec, DmcParams, Event, LeaveSelector, McParams, Scenario};
use mcb_core::RewardModel;
use proptest::prelude::*;

fn scenario(which: u8, events: Vec<Event>) -> Scenario {
    let algorithm = match which {
        0 => Algorithm::Mc(McParams { t0: 40, t1: None }),
        1 => Algorithm::Dmc(DmcParams { t0: 30, t1: 90 }),
        2 => Algorithm::Mega(MegaParams {
            c: 0.1,
            d: 0.1,
            alpha: 0.5,
            p0: 0.6,
            beta: 2.0 / 3.0,
            no_arm: NoArmRule::Random,
        }),
        _ => Algorithm::Random,
    };
    Scenario {
        arms: ArmsSpec::explicit(vec![0.8, 0.75, 0.5, 0.3, 0.25, 0.05], RewardModel::Bernoulli),
        horizon: 400,
        algorithm,
        initial_players: 3,
        events,
        seeds: vec![],
    }
}

fn events() -> impl Strategy<Value = Vec<Event>> {
    let who = prop_oneof![Just(LeaveSelector::Oldest), Just(LeaveSelector::Newest), Just(LeaveSelector::Random)];
    let e = prop_oneof![(1u64..400).prop_map(Event::enter), (1u64..400, who).prop_map(|(r, w)| Event::leave(r, w))];
    prop::collection::vec(e, 0..6).prop_map(|mut v| {
        v.sort_by_key(|e| e.round);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn records_agree_with_the_plays(which in 0u8..4, events in events(), seed in any::<u64>()) {
        let s = scenario(which, events);
        prop_assume!(s.validate().is_ok());
        let arms = s.arm_set().unwrap();
        let trace = run(&s, seed).unwrap();
        prop_assert_eq!(trace.records.len() as u64, s.horizon);
        let mut cum = 0.0;
        let mut reward = 0.0;
        for rec in &trace.records {
            let plays = trace.plays(rec);
            prop_assert_eq!(plays.len(), rec.n_active);
            let outcomes: Vec<PlayerOutcome> = plays
                .iter()
                .filter_map(|p| p.arm.map(|arm| PlayerOutcome { player: p.player, arm, collided: p.collided, reward: p.reward }))
                .collect();
            for o in &outcomes {
                prop_assert_eq!(o.collided, outcomes.iter().filter(|x| x.arm == o.arm).count() > 1);
            }
            prop_assert_eq!(rec.collisions, outcomes.iter().filter(|o| o.collided).count());
            prop_assert_eq!(rec.regret_inst, per_round_regret(&arms, &outcomes, rec.n_active).unwrap());
            cum += rec.regret_inst;
            reward += outcomes.iter().map(|o| o.reward).sum::<f64>();
            prop_assert!((rec.regret_cum - cum).abs() <= 1e-9 * cum.max(1.0));
        }
        prop_assert!((trace.total_regret - cum).abs() <= 1e-9 * cum.max(1.0));
        prop_assert!((trace.realized_reward - reward).abs() <= 1e-9 * reward.max(1.0));
        if which <= 1 {
            let split = decompose(&trace).unwrap();
            prop_assert_eq!(Some(split), trace.split);
            prop_assert!((split.total() - trace.total_regret).abs() <= 1e-9 * trace.total_regret.max(1.0));
        } else {
            prop_assert!(trace.split.is_none());
        }
    }

    #[test]
    fn decimation_keeps_the_totals(which in 0u8..4, events in events(), seed in any::<u64>(), k in 2u64..50) {
        let s = scenario(which, events);
        prop_assume!(s.validate().is_ok());
        let full = run(&s, seed).unwrap();
        let thin = run_with(&s, seed, RunOptions { decimate: k, keep_plays: true }).unwrap();
        prop_assert_eq!(thin.total_regret, full.total_regret);
        prop_assert!(!thin.has_plays() || thin.records.iter().all(|r| r.n_active == 0));
        for rec in &thin.records {
            prop_assert!(rec.round % k == 0 || rec.round == s.horizon);
            prop_assert_eq!(rec.regret_cum, full.records[rec.round as usize - 1].regret_cum);
        }
    }
}
