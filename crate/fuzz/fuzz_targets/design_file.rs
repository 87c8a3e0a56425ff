//! Arbitrary bytes must never panic the design-file loader, and anything
//! it accepts must survive a save/load cycle unchanged.

#![no_main]

use ionduct::io::DesignFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = DesignFile::from_json_str(text) {
        let rendered = file.to_json_string();
        let reloaded = DesignFile::from_json_str(&rendered)
            .expect("canonical output must reload");
        assert_eq!(file, reloaded, "save/load cycle changed the design");
    }
});
