//! Arbitrary bytes must never panic the sweep-spec parser; accepted specs
//! must yield a finite, ordered, bounded grid and reparse identically.

#![no_main]

use ionduct::io::sweep::MAX_SWEEP_POINTS;
use ionduct::io::SweepSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = SweepSpec::parse(text) {
        let grid = spec.voltages();
        assert!(!grid.is_empty() && grid.len() <= MAX_SWEEP_POINTS + 1);
        assert_eq!(grid[0], spec.start);
        for pair in grid.windows(2) {
            assert!(pair[0] <= pair[1], "grid must be ordered");
        }
        for v in &grid {
            assert!(v.is_finite(), "grid point {v} is not finite");
        }
        let rendered = format!("{}:{}:{}", spec.start, spec.stop, spec.step);
        let reparsed = SweepSpec::parse(&rendered).expect("canonical spec must reparse");
        assert_eq!(spec, reparsed, "format/parse cycle changed the spec");
    }
});
