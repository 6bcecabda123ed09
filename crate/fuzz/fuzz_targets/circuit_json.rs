#![no_main]

use libfuzzer_sys::fuzz_target;
use qfy::json::{from_json, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(circuit) = from_json(text) {
        let again = to_json(&circuit).expect("parsed circuits serialize");
        assert_eq!(from_json(&again).expect("own output parses"), circuit);
    }
});
