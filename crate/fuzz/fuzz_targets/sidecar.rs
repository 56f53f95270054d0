#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::retrieval::jaccard_estimate;
use spot_core::retrieval::sidecar::read_sidecar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = read_sidecar(text) {
        let sigs: Vec<_> = entries.iter().map(|e| e.signature()).collect();
        for w in sigs.windows(2) {
            if let Ok(j) = jaccard_estimate(&w[0], &w[1]) {
                assert!((0.0..=1.0).contains(&j));
            }
        }
    }
});
