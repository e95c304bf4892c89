#![no_main]

use kforest::experiment::{parse_checkpoint_list, parse_degree_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ds) = parse_degree_list(text) {
        assert!(!ds.is_empty());
        assert!(ds.iter().all(|d| d.is_finite() && *d >= 0.0));
        assert!(ds.windows(2).all(|w| w[0] <= w[1]));
    }
    if let Ok(ms) = parse_checkpoint_list(text) {
        assert!(ms.windows(2).all(|w| w[0] <= w[1]));
        let joined = ms
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        assert_eq!(parse_checkpoint_list(&joined).unwrap(), ms);
    }
});
