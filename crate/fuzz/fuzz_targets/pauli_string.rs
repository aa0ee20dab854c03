#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::PauliString;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = s.parse::<PauliString>() {
        let again: PauliString = p.to_string().parse().expect("display output parses");
        assert_eq!(again, p);
    }
});
