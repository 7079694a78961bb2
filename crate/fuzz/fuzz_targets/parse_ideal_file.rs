#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidity_core::groups::AmbientGroup;
use rigidity_core::poly::parse_ideal_file;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_ideal_file(text, &AmbientGroup::SpecialLinear(2).variables());
});
