#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::Ansatz;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(a) = Ansatz::from_json(s) {
        for g in &a.gates {
            assert!(g.target < a.n_qubits());
        }
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(Ansatz::from_json(&json).unwrap(), a);
    }
});
