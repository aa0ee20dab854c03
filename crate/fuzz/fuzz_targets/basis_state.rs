#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::BasisState;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = s.parse::<BasisState>() {
        assert_eq!(b.to_string(), s);
        assert!(b.index() < 1usize << b.len());
    }
});
