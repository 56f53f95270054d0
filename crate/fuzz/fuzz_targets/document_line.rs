#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::map::documents::{parse_document_line, parse_documents};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_documents(text);
    if let Ok(doc) = parse_document_line(text) {
        // whatever parses must survive a render/parse cycle unchanged
        let again = parse_document_line(&doc.render()).expect("rendered document parses");
        assert_eq!(again, doc);
    }
});
