#![no_main]

use libfuzzer_sys::fuzz_target;
use mcb_core::schedule::{apply_override, apply_overrides};
use mcb_core::Scenario;

const BASE: &str = r#"{
  "arms": {"means": [0.9, 0.5, 0.1]},
  "horizon": 1000,
  "algorithm": {"name": "dmc", "params": {"t0": 50, "t1": 200}},
  "initial_players": 2,
  "events": [{"round": 300, "kind": "enter"}, {"round": 600, "kind": "leave", "who": "oldest"}],
  "seeds": [0, 1]
}"#;

// Each line is one `key=value` assignment.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let lines: Vec<&str> = text.lines().take(8).collect();
    let mut doc: serde_json::Value = serde_json::from_str(BASE).unwrap();
    for l in &lines {
        let _ = apply_override(&mut doc, l);
    }
    let base = Scenario::from_json(BASE).unwrap();
    if let Ok(s) = apply_overrides(&base, &lines) {
        let _ = s.validate();
    }
});
