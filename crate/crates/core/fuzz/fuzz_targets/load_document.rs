#![no_main]

use libfuzzer_sys::fuzz_target;
use traceflow::document::{load_document, parse_document};

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = load_document(data) {
        let again = parse_document(&doc.to_json()).expect("serialized documents parse");
        assert_eq!(again, doc);
    }
});
