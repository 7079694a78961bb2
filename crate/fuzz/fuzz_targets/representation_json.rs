#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidity_core::groups::RepresentationSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = RepresentationSpec::from_json(text);
    }
});
