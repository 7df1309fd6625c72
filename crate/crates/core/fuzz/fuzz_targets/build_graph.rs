#![no_main]

use libfuzzer_sys::fuzz_target;
use traceflow::document::load_document;
use traceflow::export::{export_dot, export_facts, DotOptions};
use traceflow::query::{read_facts, BaseFacts};
use traceflow::{build_graph, Strictness};

// Any document that builds must survive every export path.
fuzz_target!(|data: &[u8]| {
    let Ok(doc) = load_document(data) else {
        return;
    };
    for strictness in [Strictness::Lenient, Strictness::Strict] {
        let Ok(graph) = build_graph(&doc, strictness) else {
            continue;
        };
        let _ = export_dot(&graph, DotOptions::default());
        if let Ok(facts) = export_facts(&graph) {
            let read = read_facts(&facts).expect("exported facts parse");
            assert_eq!(read, BaseFacts::from_graph(&graph));
        }
        let rebuilt = build_graph(&graph.to_document(), strictness).expect("rebuild succeeds");
        assert_eq!(rebuilt.to_document(), graph.to_document());
        if let Ok(compressed) = graph.compress_to_conclusion() {
            assert!(compressed.kept <= compressed.total);
        }
    }
});
