#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::sim::read_gt;

fuzz_target!(|data: &[u8]| {
    let _ = read_gt(data);
});
