#![no_main]

use libfuzzer_sys::fuzz_target;
use mcb_core::engine::{run_with, EngineError, RunOptions};
use mcb_core::schedule::MeanSource;
use mcb_core::Scenario;

const MAX_HORIZON: u64 = 2000;
const MAX_ARMS: usize = 16;
const MAX_EVENTS: usize = 64;

// Parse, validate and run a short game. A scenario that validates must
// run without errors, and its trace must be internally consistent.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut s) = Scenario::from_json(text) else { return };
    if s.k() > MAX_ARMS || s.events.len() > MAX_EVENTS {
        return;
    }
    if let MeanSource::Random(r) = &s.arms.source {
        if r.min_gap > 0.5 {
            return;
        }
    }
    s.horizon = s.horizon.min(MAX_HORIZON);
    s.events.retain(|e| e.round <= s.horizon);
    if !s.validate().is_ok() {
        return;
    }
    let trace = match run_with(&s, 0, RunOptions::default()) {
        Ok(t) => t,
        // Random means may miss the requested gap.
        Err(EngineError::Env(_)) if matches!(s.arms.source, MeanSource::Random(_)) => return,
        // Random leaves can target players that are already gone.
        Err(EngineError::Roster(_)) => return,
        Err(e) => panic!("valid scenario failed: {e}"),
    };
    assert_eq!(trace.records.len() as u64, s.horizon);
    let sum: f64 = trace.records.iter().map(|r| r.regret_inst).sum();
    assert!((sum - trace.total_regret).abs() <= 1e-9 * sum.max(1.0));
    assert!(trace.records.iter().all(|r| r.regret_inst >= 0.0 && r.n_active <= s.k()));
});
