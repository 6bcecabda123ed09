#![no_main]

use libfuzzer_sys::fuzz_target;
use qfy::qasm::{from_qasm, to_qasm};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(circuit) = from_qasm(text) {
        assert_eq!(from_qasm(&to_qasm(&circuit)).expect("own output parses"), circuit);
    }
});
