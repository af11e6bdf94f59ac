#![no_main]

use dwlab::rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(r) = rational::parse(text) {
        assert_eq!(rational::parse(&rational::format(&r)), Some(r));
    }
});
