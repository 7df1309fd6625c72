//! Annotation documents as they appear on disk (`.rfg.json`).
//!
//! A document is a JSON object with a required `nodes` array, an optional
//! `edges` array and an optional `meta` object of string values. Node order
//! in the file is the node order of the trace. Labels are kept as raw
//! strings here; semantic checks happen in [`crate::graph::build_graph`].

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub src: String,
    pub dst: String,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationDocument {
    pub nodes: Vec<NodeRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
    #[serde(
        default,
        skip_serializing_if = "BTreeMap::is_empty",
        deserialize_with = "unique_string_map"
    )]
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("input is not valid UTF-8 (byte offset {0})")]
    Encoding(usize),
    #[error("{message} at line {line}, column {column}")]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },
}

impl AnnotationDocument {
    pub fn node(&mut self, id: &str, label: &str, text: &str) -> &mut Self {
        self.nodes.push(NodeRecord {
            id: id.to_string(),
            label: label.to_string(),
            text: text.to_string(),
        });
        self
    }

    pub fn edge(&mut self, src: &str, dst: &str, label: &str) -> &mut Self {
        self.edges.push(EdgeRecord {
            src: src.to_string(),
            dst: dst.to_string(),
            label: label.to_string(),
        });
        self
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("documents always serialize to JSON");
        out.push('\n');
        out
    }
}

/// Parses an annotation document from raw bytes.
pub fn load_document(bytes: &[u8]) -> Result<AnnotationDocument, DocumentError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DocumentError::Encoding(e.valid_up_to()))?;
    parse_document(text)
}

pub fn parse_document(text: &str) -> Result<AnnotationDocument, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        message: strip_position(&e.to_string()),
        line: e.line(),
        column: e.column(),
    })
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(at) => message[..at].to_string(),
        None => message.to_string(),
    }
}

fn unique_string_map<'de, D>(deserializer: D) -> Result<BTreeMap<String, String>, D::Error>
where
    D: Deserializer<'de>,
{
    struct UniqueMap;

    impl<'de> Visitor<'de> for UniqueMap {
        type Value = BTreeMap<String, String>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object of string values")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut map = BTreeMap::new();
            while let Some((key, value)) = access.next_entry::<String, String>()? {
                if map.contains_key(&key) {
                    return Err(de::Error::custom(format!("duplicate meta key `{key}`")));
                }
                map.insert(key, value);
            }
            Ok(map)
        }
    }

    deserializer.deserialize_map(UniqueMap)
}
