#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::experiment::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_toml_str(text) {
        let out = cfg.to_toml_string().expect("valid config serializes");
        let back = ExperimentConfig::from_toml_str(&out).expect("serialized config reloads");
        assert_eq!(back.to_toml_string().expect("serializes"), out);
    }
});
