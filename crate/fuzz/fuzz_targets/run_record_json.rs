#![no_main]

use libfuzzer_sys::fuzz_target;
use susyvqe::avqe::AVQETrace;
use susyvqe::record::RunRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = RunRecord::from_json(s) {
        let _ = RunRecord::from_json(&rec.to_json_pretty()).expect("round-trip");
        // AVQE records carry a trace in their outputs
        let _ = serde_json::from_value::<AVQETrace>(rec.outputs);
    }
});
