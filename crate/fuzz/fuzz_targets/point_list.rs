#![no_main]

use dualgeo::parse::{parse_point, parse_point_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(points) = parse_point_list(data) {
        assert!(points.iter().flatten().all(|x| x.is_finite()));
    }
    let _ = parse_point(data);
});
