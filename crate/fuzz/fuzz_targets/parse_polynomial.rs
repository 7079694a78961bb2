#![no_main]

use libfuzzer_sys::fuzz_target;
use rigidity_core::poly::{parse_polynomial, vars};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let v = vars(&["x", "y", "z"]);
    // anything that parses must print back to the same polynomial
    if let Ok(p) = parse_polynomial(text, &v) {
        let again = parse_polynomial(&p.to_string(), &v).expect("printed form parses");
        assert_eq!(again, p);
    }
});
