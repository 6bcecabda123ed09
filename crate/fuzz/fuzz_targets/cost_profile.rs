#![no_main]

use libfuzzer_sys::fuzz_target;
use qfy::builders::{BuildSpec, Variant};
use qfy::cost::CostProfile;
use qfy::resources::{cycle_count_formula, gate_count_formula};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(profile) = CostProfile::from_json(text) else { return };
    for variant in Variant::ALL {
        let m = variant.has_data().then_some(2);
        let spec = BuildSpec::binary(variant, 5, m).expect("valid spec");
        // huge costs may overflow; only panics are findings
        let _ = gate_count_formula(&spec, &profile);
        let _ = cycle_count_formula(&spec, &profile);
    }
});
