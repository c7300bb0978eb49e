#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::csvio::{read_real_matrix, write_real_matrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = read_real_matrix(data) {
        let mut buf = Vec::new();
        write_real_matrix(&mut buf, &m).expect("writing to memory");
        let back = read_real_matrix(buf.as_slice()).expect("written matrix reads back");
        assert_eq!(back.shape(), m.shape());
    }
});
