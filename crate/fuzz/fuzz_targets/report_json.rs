#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::eval::{render_report, rows_from_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = rows_from_json(text) {
        let _ = render_report(&rows);
    }
});
