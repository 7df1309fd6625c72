#![no_main]

use libfuzzer_sys::fuzz_target;
use traceflow::query::read_facts;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = read_facts(text);
    }
});
