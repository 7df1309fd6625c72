//! Tools for annotated reasoning-trace graphs.
//!
//! A trace is split into labeled nodes (planning, fact, reasoning, ...) that
//! are linked by labeled edges running from earlier to later nodes. This
//! crate loads such annotations, validates them, answers Datalog-style
//! queries over them, detects named reasoning patterns and computes corpus
//! statistics.
//!
//! ```
//! use traceflow::document::parse_document;
//! use traceflow::graph::build_graph;
//! use traceflow::patterns::{builtin_pattern, detect};
//! use traceflow::validate::Strictness;
//!
//! let doc = parse_document(r#"{
//!   "nodes": [
//!     {"id": "p1", "label": "planning", "text": "Try factoring."},
//!     {"id": "p2", "label": "planning", "text": "Alternatively, use the formula."}
//!   ],
//!   "edges": [{"src": "p1", "dst": "p2", "label": "plan-alternative"}]
//! }"#).unwrap();
//! let graph = build_graph(&doc, Strictness::Strict).unwrap();
//! let found = detect(&builtin_pattern("backtracking").unwrap(), &graph);
//! assert_eq!(found.matches.rows(), [["p1", "p2"]]);
//! ```

pub mod document;
pub mod export;
pub mod graph;
pub mod label;
pub mod patterns;
pub mod query;
pub mod stats;
pub mod validate;

pub use document::{load_document, AnnotationDocument};
pub use graph::{build_graph, ContextMode, FlowGraph, GraphError};
pub use label::{EdgeCategory, EdgeLabel, NodeLabel};
pub use validate::{Severity, Strictness, ValidationReport};
