#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::photonic::Circuit;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Circuit::from_toml_str(text) {
        let out = c.to_toml_string().expect("valid circuit serializes");
        let back = Circuit::from_toml_str(&out).expect("serialized circuit reloads");
        assert_eq!(back.to_toml_string().expect("serializes"), out);
    }
});
