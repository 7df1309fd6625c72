#![no_main]

use libfuzzer_sys::fuzz_target;
use traceflow::query::parse_query;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(program) = parse_query(text) {
        let printed = program.to_string();
        let reparsed = parse_query(&printed).expect("printed programs parse");
        assert_eq!(reparsed.to_string(), printed);
    }
});
