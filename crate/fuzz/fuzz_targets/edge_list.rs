#![no_main]

use kforest::graph::{parse_edge_list, write_edge_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(list) = parse_edge_list(text) else {
        return;
    };
    let mut buf = Vec::new();
    write_edge_list(&mut buf, &list.graph, list.weights.as_deref()).unwrap();
    let again =
        parse_edge_list(std::str::from_utf8(&buf).unwrap()).expect("written edge lists parse");
    assert_eq!(again, list);
});
