//! Arbitrary bytes must never panic the measurement-CSV parser, and any
//! table it accepts must survive a render/parse cycle unchanged.

#![no_main]

use ionduct::io::measurements::{parse_measurements_str, render_measurements};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(curves) = parse_measurements_str(text) {
        let rendered = render_measurements(&curves);
        let reparsed = parse_measurements_str(&rendered)
            .expect("canonical output must reparse");
        assert_eq!(curves, reparsed, "render/parse cycle changed the table");
    }
});
