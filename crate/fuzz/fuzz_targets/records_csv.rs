#![no_main]

use kforest::experiment::{parse_records, write_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(records) = parse_records(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_records(&records, &mut buf).unwrap();
    let again = parse_records(buf.as_slice()).expect("written records parse");
    assert_eq!(again.len(), records.len());
    for (a, b) in records.iter().zip(&again) {
        assert_eq!(
            (a.kind, a.n, a.k, a.seed, a.row, a.trial, a.metric, a.status),
            (b.kind, b.n, b.k, b.seed, b.row, b.trial, b.metric, b.status)
        );
    }
});
