#![no_main]

use dwlab::instance_gen::PackingInstance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = PackingInstance::from_json(text) {
        let again = PackingInstance::from_json(&inst.to_json()).expect("written instance parses");
        assert_eq!(inst, again);
    }
});
