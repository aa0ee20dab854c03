#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::PauliSum;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sum) = PauliSum::from_json(s) {
        // emitted JSON must parse back to the same sum
        let back = PauliSum::from_json(&sum.to_json()).expect("round-trip");
        assert_eq!(back, sum);
    }
});
