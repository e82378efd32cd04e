//! Fuzz the name parsers behind the CLI flags (policy, scenario, report
//! format): they must never panic, and anything they accept must print
//! back to the exact input.

#![no_main]

use std::str::FromStr;

use libfuzzer_sys::fuzz_target;
use qgdm_core::harness::ReportFormat;
use qgdm_core::policy::PolicyKind;
use qgdm_core::sim::ScenarioKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(policy) = PolicyKind::from_str(text) {
        assert_eq!(policy.to_string(), text);
    }
    if let Ok(scenario) = ScenarioKind::from_str(text) {
        assert_eq!(scenario.to_string(), text);
    }
    if let Ok(format) = ReportFormat::from_str(text) {
        assert_eq!(format.to_string(), text);
    }
});
