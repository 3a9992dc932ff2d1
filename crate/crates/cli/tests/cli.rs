use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mcb_core::schedule::{PresetName, Scenario};

fn mcb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcb")).args(args).env("MCB_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let o = mcb(&["run", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for p in PresetName::ALL {
        assert!(err.contains(p.as_str()), "{err}");
    }
}

#[test]
fn bounds_print_the_expected_values() {
    let o = mcb(&["bounds", "t1", "--T", "1e6", "--t0", "3000", "--tf", "73.9", "--x", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "T1 39673");
    let o = mcb(&["bounds", "exponents", "--lambda", "0.84", "--beta", "0.6667"]);
    assert_eq!(stdout(&o), "mega 0.8267\ndmc 0.5800\n");
    let o = mcb(&["bounds", "t0-static", "--k", "10", "--eps", "0.05", "--delta", "0.1"]);
    assert!(stdout(&o).ends_with("T0 530820\n"), "{}", stdout(&o));
    let o = mcb(&["bounds", "collision-prob", "--k", "10", "--n", "3"]);
    assert_eq!(stdout(&o).trim(), "p 0.190000");
}

#[test]
fn bounds_reject_missing_or_bad_arguments() {
    let o = mcb(&["bounds", "t1", "--T", "1e6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    let o = mcb(&["bounds", "t0-static", "--k", "1", "--eps", "0.1", "--delta", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emitted_presets_parse_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    for p in PresetName::ALL {
        let file = dir.path().join(format!("{p}.json"));
        let o = mcb(&["emit-preset", p.as_str(), "--out", path(&file)]);
        assert!(o.status.success(), "{p}: {}", stderr(&o));
        let s = Scenario::load(&file).unwrap();
        assert!(s.validate().is_ok(), "{p}");
        let o = mcb(&["validate", path(&file)]);
        assert!(o.status.success(), "{p}: {}", stderr(&o));
    }
    let figure = Scenario::load(&dir.path().join("theorem3.json")).unwrap();
    assert_eq!(figure.k(), 4);
    let churn = Scenario::load(&dir.path().join("theorem4.json")).unwrap();
    assert_eq!(churn.horizon, 500_000);
    // Events every ceil(T^0.84) rounds.
    assert_eq!(churn.events[0].round, 61_255);
    assert_eq!(churn.events[1].round, 2 * 61_255);
}

#[test]
fn config_run_matches_preset_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t4.json");
    let shared = ["--horizon", "30000", "--algo", "mega"];
    let mut emit = vec!["emit-preset", "theorem4", "--out", path(&file)];
    emit.extend(shared);
    assert!(mcb(&emit).status.success());

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let mut from_preset = vec!["run", "--preset", "theorem4", "--seeds", "2", "--out", path(&a)];
    from_preset.extend(shared);
    let o = mcb(&from_preset);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mcb(&["run", "--config", path(&file), "--seeds", "2", "--out", path(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));

    for name in ["trace_seed0.csv", "trace_seed1.csv", "events_seed0.csv", "summary.csv", "scenario.json"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn run_writes_csvs_with_plain_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mcb(&[
        "run",
        "--preset",
        "static",
        "--seed-list",
        "3,5",
        "--set",
        "horizon=4000",
        "--out",
        path(&out),
        "--gnuplot",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("seed 3: regret") && text.contains("seed 5: regret"), "{text}");
    assert!(text.contains("over 2 seed(s)"), "{text}");
    assert!(out.join("plot.gp").exists());

    let headers = [
        ("trace_seed3.csv", "round,n_active,regret_inst,regret_cum,collisions"),
        ("events_seed5.csv", "player,event,round"),
        ("summary.csv", "round,mean_avg_regret,std_avg_regret"),
    ];
    for (name, header) in headers {
        let body = fs::read_to_string(out.join(name)).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some(header));
        for line in lines {
            for (i, field) in line.split(',').enumerate() {
                let numeric = !(name.starts_with("events") && i == 1);
                if numeric {
                    assert!(field.parse::<f64>().is_ok(), "{name}: `{field}` in `{line}`");
                }
            }
        }
    }
    let trace = fs::read_to_string(out.join("trace_seed3.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4001);
    assert!(trace.lines().last().unwrap().starts_with("4000,6,"));
}

#[test]
fn decimation_thins_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mcb(&["run", "--preset", "static", "--horizon", "5000", "--decimate", "1000", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rounds: Vec<String> = fs::read_to_string(out.join("trace_seed0.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(rounds, ["1000", "2000", "3000", "4000", "5000"]);
}

#[test]
fn bad_configs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"arms\": ").unwrap();
    assert_eq!(mcb(&["run", "--config", path(&broken)]).status.code(), Some(2));

    let invalid = dir.path().join("invalid.json");
    fs::write(
        &invalid,
        r#"{"arms": {"means": [0.9, 0.1]}, "horizon": 100, "algorithm": {"name": "mc", "params": {"t0": 10}},
            "initial_players": 3}"#,
    )
    .unwrap();
    let o = mcb(&["validate", path(&invalid)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("3 initial players exceed 2 arms"), "{}", stdout(&o));
    let o = mcb(&["run", "--config", path(&invalid), "--out", path(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error: 3 initial players"), "{}", stderr(&o));

    let o =
        mcb(&["run", "--config", path(&invalid), "--set", "initial_players=2", "--out", path(&dir.path().join("y"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(mcb(&["validate", path(&invalid), "--set", "nope.x=1"]).status.code(), Some(2));
    assert_eq!(mcb(&["run", "--config", path(&invalid), "--algo", "mega"]).status.code(), Some(2));
}
