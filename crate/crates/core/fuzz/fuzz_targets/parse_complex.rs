#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::csvio::{format_complex, parse_complex};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(text) {
        let again = parse_complex(&format_complex(z)).expect("formatted value parses");
        assert!(again == z || (z.re.is_nan() || z.im.is_nan()));
    }
});
