#![no_main]

use dwlab::game_value::ValueCertificate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cert) = serde_json::from_slice::<ValueCertificate>(data) {
        let text = serde_json::to_string(&cert).expect("certificate serialises");
        let again: ValueCertificate = serde_json::from_str(&text).expect("written certificate parses");
        assert_eq!(cert, again);
    }
});
