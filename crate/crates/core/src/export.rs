//! Fact-program and Graphviz DOT renderings of a graph.

use std::fmt::Write;

use thiserror::Error;

use crate::graph::FlowGraph;
use crate::label::{EdgeCategory, EdgeLabel, NodeLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node id `{0}` is not a bare atom ([a-z][a-z0-9_]*)")]
pub struct InvalidAtom(pub String);

pub fn is_bare_atom(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

/// Renders the base relation as one `node/2` or `edge/3` fact per line.
///
/// Nodes come first in ordinal order, then edges by (source ordinal,
/// destination ordinal, label). Derived predicates are not written.
pub fn export_facts(graph: &FlowGraph) -> Result<String, InvalidAtom> {
    if let Some(bad) = graph.nodes().iter().find(|n| !is_bare_atom(&n.id)) {
        return Err(InvalidAtom(bad.id.clone()));
    }
    let mut out = String::new();
    for node in graph.nodes() {
        writeln!(out, "node({}, \"{}\").", node.id, node.label).unwrap();
    }
    for edge in graph.edges() {
        writeln!(
            out,
            "edge({}, {}, \"{}\").",
            graph.node(edge.src).id,
            graph.node(edge.dst).id,
            edge.label
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DotOptions {
    pub color_by_label: bool,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            color_by_label: true,
        }
    }
}

/// Longest node text shown in a DOT label, in characters.
pub const DOT_TEXT_LIMIT: usize = 60;

/// Fill color for a node label.
pub fn node_fill(label: NodeLabel) -> &'static str {
    match label {
        NodeLabel::Context => "#D9D9D9",
        NodeLabel::Planning => "#FFADAD",
        NodeLabel::Fact => "#FFD6A5",
        NodeLabel::Reasoning => "#FDFFB6",
        NodeLabel::Restatement => "#CAFFBF",
        NodeLabel::Assumption => "#B3FBDF",
        NodeLabel::Example => "#9BF6FF",
        NodeLabel::Reflection => "#A0C4FF",
        NodeLabel::Conclusion => "#C3B1E1",
    }
}

pub fn node_shape(label: NodeLabel) -> &'static str {
    match label {
        NodeLabel::Context => "note",
        NodeLabel::Planning => "hexagon",
        NodeLabel::Fact => "box",
        NodeLabel::Reasoning => "ellipse",
        NodeLabel::Restatement => "ellipse",
        NodeLabel::Assumption => "parallelogram",
        NodeLabel::Example => "component",
        NodeLabel::Reflection => "octagon",
        NodeLabel::Conclusion => "doubleoctagon",
    }
}

/// Stroke color for an edge, by category.
pub fn edge_color(label: EdgeLabel) -> &'static str {
    match label.category() {
        EdgeCategory::Planning => "#D1495B",
        EdgeCategory::Reasoning => "#555555",
        EdgeCategory::Evaluation => "#3A6EA5",
    }
}

fn truncate(text: &str) -> String {
    if text.chars().count() <= DOT_TEXT_LIMIT {
        return text.to_string();
    }
    let mut short: String = text.chars().take(DOT_TEXT_LIMIT - 1).collect();
    short.push('…');
    short
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph as a Graphviz digraph. Output is byte-deterministic.
pub fn export_dot(graph: &FlowGraph, options: DotOptions) -> String {
    let mut out = String::from("digraph trace {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");
    for node in graph.nodes() {
        let label = format!("{} [{}]\n{}", node.id, node.label, truncate(&node.text));
        write!(
            out,
            "  {} [label={}, shape={}",
            quote(&node.id),
            quote(&label),
            node_shape(node.label)
        )
        .unwrap();
        if options.color_by_label {
            write!(
                out,
                ", style=filled, fillcolor={}",
                quote(node_fill(node.label))
            )
            .unwrap();
        }
        out.push_str("];\n");
    }
    for edge in graph.edges() {
        write!(
            out,
            "  {} -> {} [label={}",
            quote(&graph.node(edge.src).id),
            quote(&graph.node(edge.dst).id),
            quote(edge.label.as_str())
        )
        .unwrap();
        if options.color_by_label {
            write!(out, ", color={}", quote(edge_color(edge.label))).unwrap();
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}
