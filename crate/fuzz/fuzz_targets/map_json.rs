#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::map::MapFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = MapFile::from_json(text) {
        let _ = m.into_parts();
    }
});
