#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::perception::io::{read_observations, write_observations};

fuzz_target!(|data: &[u8]| {
    if let Ok(obs) = read_observations(data) {
        let mut out = Vec::new();
        write_observations(&mut out, &obs).expect("observations write back");
        assert_eq!(read_observations(out.as_slice()).expect("written observations parse").len(), obs.len());
    }
});
