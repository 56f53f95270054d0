#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::sim::read_visits;

fuzz_target!(|data: &[u8]| {
    let _ = read_visits(data);
});
