#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::NoiseModel;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(n) = s.parse::<NoiseModel>() {
        n.validate().expect("parsed models are valid");
        assert_eq!(n.to_string().parse::<NoiseModel>().unwrap(), n);
    }
});
