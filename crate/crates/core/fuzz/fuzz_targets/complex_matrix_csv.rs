#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::csvio::{read_complex_matrix, write_complex_matrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = read_complex_matrix(data) {
        let mut buf = Vec::new();
        write_complex_matrix(&mut buf, &m).expect("writing to memory");
        let back = read_complex_matrix(buf.as_slice()).expect("written matrix reads back");
        assert_eq!(back.shape(), m.shape());
    }
});
