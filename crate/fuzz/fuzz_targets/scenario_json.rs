#![no_main]

use libfuzzer_sys::fuzz_target;
use mcb_core::Scenario;

// Any parsed scenario must survive a write and re-read unchanged, and
// validation must never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = Scenario::from_json(text) else { return };
    let _ = s.validate();
    let again = Scenario::from_json(&s.to_json_pretty()).expect("written scenario parses");
    assert_eq!(again, s);
});
