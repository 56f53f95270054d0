#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::pipeline::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // a leading `key=value` line is a --set override; the rest is the file
    let (overrides, body) = match text.split_once('\n') {
        Some((first, rest)) if first.contains('=') && !first.starts_with('{') => (vec![first.to_string()], rest),
        _ => (Vec::new(), text),
    };
    if let Ok(cfg) = Config::load(body, &overrides) {
        assert!(cfg.validate().is_ok());
    }
});
