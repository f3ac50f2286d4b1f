#![no_main]

use dche::DcheParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = DcheParams::from_json(s) {
        let again = DcheParams::from_json(&p.to_json()).expect("serialized params parse");
        assert_eq!(again, p);
    }
});
