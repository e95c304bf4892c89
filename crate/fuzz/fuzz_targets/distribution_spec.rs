#![no_main]

use kforest::graph::WeightDistribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(dist) = text.parse::<WeightDistribution>() else {
        return;
    };
    dist.validate().expect("parsed distributions are valid");
    assert_eq!(
        dist.to_string().parse::<WeightDistribution>().unwrap(),
        dist
    );
    let slope = dist.density_slope();
    assert!(slope.is_finite() && slope > 0.0);
    for u in [0.0, 0.25, 0.5, 0.999] {
        assert!(dist.quantile(u) >= 0.0);
    }
});
