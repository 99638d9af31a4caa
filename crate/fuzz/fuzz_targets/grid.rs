#![no_main]

use dualgeo::parse::{grid_points, parse_grid, MAX_GRID_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (u8, &str)| {
    let dim = usize::from(input.0 % 4) + 1;
    if let Ok(axes) = parse_grid(input.1, dim) {
        assert_eq!(axes.len(), dim);
        let total: usize = axes.iter().map(|a| a.n).product();
        assert!(total <= MAX_GRID_POINTS);
        if total <= 4096 {
            assert_eq!(grid_points(&axes).len(), total);
        }
    }
});
