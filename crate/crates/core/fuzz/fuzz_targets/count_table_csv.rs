#![no_main]

use libfuzzer_sys::fuzz_target;
use tfqsim::stats::CountTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = CountTable::read_csv(data) {
        let mut buf = Vec::new();
        table.write_csv(&mut buf).expect("writing to memory");
        let back = CountTable::read_csv(buf.as_slice()).expect("written table reads back");
        assert_eq!(back.rows().len(), table.rows().len());
    }
});
