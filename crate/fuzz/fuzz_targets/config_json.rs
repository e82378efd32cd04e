//! Fuzz the experiment-config decoder: arbitrary bytes must either be
//! rejected with an error or produce a config that survives a
//! serialize/parse round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qgdm_core::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ExperimentConfig::from_json(text) else { return };
    // Accepted configs are canonical: validation is stable and the JSON
    // encoding round-trips to an identical value.
    config.validate().expect("an accepted config must stay valid");
    let encoded = serde_json::to_string(&config).expect("configs are plain data");
    let reparsed = ExperimentConfig::from_json(&encoded)
        .expect("a config's own encoding must parse");
    assert_eq!(reparsed, config);
});
