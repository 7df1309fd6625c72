//! The validated trace graph and its structural queries.
//!
//! Edges always run from an earlier node to a later one, so document order
//! is a topological order and the graph is acyclic by construction. The
//! all-pairs distance table is filled once at construction with a single
//! forward sweep per source node.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use thiserror::Error;

use crate::document::AnnotationDocument;
use crate::label::{EdgeLabel, NodeLabel};
use crate::validate::{self, rules, Severity, Strictness, ValidationReport};

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("graph has no conclusion node")]
    NoConclusion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub label: NodeLabel,
    pub text: String,
    pub ordinal: usize,
}

/// An edge between two node ordinals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: EdgeLabel,
}

/// Which predecessors make up an evaluation context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextMode {
    /// Nodes with an edge into the target.
    Direct,
    /// Every ancestor of the target.
    Closure,
}

/// Immutable labeled DAG built from an [`AnnotationDocument`].
#[derive(Debug, Clone)]
pub struct FlowGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    dist: Vec<u32>,
    meta: BTreeMap<String, String>,
    strictness: Strictness,
    warnings: ValidationReport,
}

/// Result of [`FlowGraph::compress_to_conclusion`].
#[derive(Debug, Clone)]
pub struct Compression {
    pub graph: FlowGraph,
    /// Generated (non-context) nodes kept.
    pub kept: usize,
    /// Generated (non-context) nodes in the input.
    pub total: usize,
}

impl Compression {
    pub fn ratio(&self) -> f64 {
        self.kept as f64 / self.total as f64
    }
}

/// Validates `doc` and builds the graph.
///
/// Returns the full report when any error-severity finding exists. In strict
/// mode endpoint-compatibility findings are errors; in lenient mode they are
/// warnings and are kept on the graph (see [`FlowGraph::warnings`]).
pub fn build_graph(
    doc: &AnnotationDocument,
    strictness: Strictness,
) -> Result<FlowGraph, ValidationReport> {
    let mut report = ValidationReport::new();

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<Option<NodeLabel>> = Vec::with_capacity(doc.nodes.len());
    let mut first_generated: Option<usize> = None;
    for (pos, rec) in doc.nodes.iter().enumerate() {
        if rec.id.is_empty() {
            report.push(
                rules::EMPTY_NODE_ID,
                Severity::Error,
                format!("node at position {pos} has an empty id"),
                &[],
                &[pos],
            );
        } else if let Some(&first) = index.get(&rec.id) {
            report.push(
                rules::DUPLICATE_NODE_ID,
                Severity::Error,
                format!("node id first used at position {first}"),
                &[&rec.id],
                &[pos],
            );
        } else {
            index.insert(rec.id.clone(), pos);
        }

        let label = match rec.label.parse::<NodeLabel>() {
            Ok(label) => Some(label),
            Err(e) => {
                report.push(
                    rules::UNKNOWN_NODE_LABEL,
                    Severity::Error,
                    e.to_string(),
                    &[&rec.id],
                    &[pos],
                );
                None
            }
        };
        match label {
            Some(NodeLabel::Context) => {
                if let Some(gen) = first_generated {
                    report.push(
                        rules::CONTEXT_ORDER,
                        Severity::Error,
                        "context node after a trace node",
                        &[&rec.id, &doc.nodes[gen].id],
                        &[pos],
                    );
                }
            }
            Some(_) => {
                first_generated.get_or_insert(pos);
            }
            None => {}
        }
        if rec.text.is_empty() {
            report.push(
                rules::EMPTY_TEXT,
                Severity::Warning,
                "node text is empty",
                &[&rec.id],
                &[pos],
            );
        }
        labels.push(label);
    }

    let conclusions: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == Some(NodeLabel::Conclusion))
        .collect();
    if let (Some(&first), Some(&last)) = (conclusions.first(), conclusions.last()) {
        if last - first + 1 != conclusions.len() {
            let gap = (first..=last)
                .find(|i| labels[*i] != Some(NodeLabel::Conclusion))
                .expect("a non-contiguous run has a gap");
            report.push(
                rules::CONCLUSION_CONTIGUITY,
                Severity::Error,
                "conclusion not contiguous",
                &[
                    &doc.nodes[first].id,
                    &doc.nodes[gap].id,
                    &doc.nodes[last].id,
                ],
                &[first, gap, last],
            );
        }
    }

    let mut edges: Vec<Edge> = Vec::with_capacity(doc.edges.len());
    for rec in &doc.edges {
        let src = index.get(&rec.src).copied();
        let dst = index.get(&rec.dst).copied();
        let positions: Vec<usize> = [src, dst].iter().map(|p| p.unwrap_or(usize::MAX)).collect();
        for (end, resolved) in [(&rec.src, src), (&rec.dst, dst)] {
            if resolved.is_none() {
                report.push(
                    rules::DANGLING_EDGE,
                    Severity::Error,
                    format!("edge endpoint `{end}` not found"),
                    &[&rec.src, &rec.dst],
                    &positions,
                );
            }
        }
        let label = match rec.label.parse::<EdgeLabel>() {
            Ok(label) => Some(label),
            Err(e) => {
                report.push(
                    rules::UNKNOWN_EDGE_LABEL,
                    Severity::Error,
                    e.to_string(),
                    &[&rec.src, &rec.dst],
                    &positions,
                );
                None
            }
        };
        let (Some(src), Some(dst)) = (src, dst) else {
            continue;
        };
        let ids = [rec.src.as_str(), rec.dst.as_str()];
        let into_context = labels[dst] == Some(NodeLabel::Context);
        let from_context = labels[src] == Some(NodeLabel::Context);
        if src == dst {
            report.push(
                rules::SELF_LOOP,
                Severity::Error,
                "self-loop edge",
                &ids,
                &positions,
            );
        } else if into_context && from_context {
            report.push(
                rules::CONTEXT_EDGE,
                validate::matrix_severity(strictness),
                "edge between context nodes",
                &ids,
                &positions,
            );
        } else if into_context {
            report.push(
                rules::CONTEXT_INCOMING,
                Severity::Error,
                "incoming edge to a context node",
                &ids,
                &positions,
            );
        } else if src > dst {
            report.push(
                rules::EDGE_DIRECTION,
                Severity::Error,
                "left-to-right violated",
                &ids,
                &positions,
            );
        }
        if src >= dst {
            continue;
        }
        let Some(label) = label else {
            continue;
        };
        if let (Some(s), Some(d)) = (labels[src], labels[dst]) {
            if let Some((rule, message)) = validate::endpoint_finding(s, d, label) {
                report.push(
                    rule,
                    validate::matrix_severity(strictness),
                    message,
                    &ids,
                    &positions,
                );
            }
        }
        edges.push(Edge { src, dst, label });
    }

    edges.sort();
    let mut unique: Vec<Edge> = Vec::with_capacity(edges.len());
    for edge in edges {
        let ids = [
            doc.nodes[edge.src].id.as_str(),
            doc.nodes[edge.dst].id.as_str(),
        ];
        match unique.last() {
            Some(prev) if *prev == edge => {
                report.push(
                    rules::DUPLICATE_EDGE,
                    Severity::Warning,
                    format!("duplicate {} edge collapsed", edge.label),
                    &ids,
                    &[edge.src, edge.dst],
                );
                continue;
            }
            Some(prev) if (prev.src, prev.dst) == (edge.src, edge.dst) => {
                report.push(
                    rules::MULTI_LABEL_PAIR,
                    Severity::Warning,
                    format!("node pair carries both {} and {}", prev.label, edge.label),
                    &ids,
                    &[edge.src, edge.dst],
                );
            }
            _ => {}
        }
        unique.push(edge);
    }

    let report = report.sorted();
    if report.has_errors() {
        return Err(report);
    }

    let nodes = doc
        .nodes
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(ordinal, (rec, label))| Node {
            id: rec.id.clone(),
            label: label.expect("labels checked above"),
            text: rec.text.clone(),
            ordinal,
        })
        .collect();
    Ok(FlowGraph::from_parts(
        nodes,
        unique,
        index,
        doc.meta.clone(),
        strictness,
        report,
    ))
}

impl FlowGraph {
    fn from_parts(
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        index: HashMap<String, usize>,
        meta: BTreeMap<String, String>,
        strictness: Strictness,
        warnings: ValidationReport,
    ) -> Self {
        let n = nodes.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for e in &edges {
            if preds[e.dst].last() != Some(&e.src) {
                preds[e.dst].push(e.src);
            }
            if succs[e.src].last() != Some(&e.dst) {
                succs[e.src].push(e.dst);
            }
        }
        for list in &mut preds {
            list.sort_unstable();
            list.dedup();
        }

        // Document order is topological: every predecessor of `y` precedes it.
        let mut dist = vec![UNREACHABLE; n * n];
        for source in 0..n {
            let row = &mut dist[source * n..(source + 1) * n];
            row[source] = 0;
            for y in source + 1..n {
                row[y] = preds[y]
                    .iter()
                    .filter(|&&p| p >= source && row[p] != UNREACHABLE)
                    .map(|&p| row[p] + 1)
                    .min()
                    .unwrap_or(UNREACHABLE);
            }
        }

        FlowGraph {
            nodes,
            edges,
            index,
            preds,
            succs,
            dist,
            meta,
            strictness,
            warnings,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Edges sorted by (source ordinal, destination ordinal, label), duplicates collapsed.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    /// Warning-severity findings produced while building.
    pub fn warnings(&self) -> &ValidationReport {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node at `ordinal`. Panics when out of range.
    pub fn node(&self, ordinal: usize) -> &Node {
        &self.nodes[ordinal]
    }

    pub fn node_by_id(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn ordinal_of(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    /// Ordinals with an edge into `ordinal`, ascending.
    pub fn predecessor_ordinals(&self, ordinal: usize) -> &[usize] {
        &self.preds[ordinal]
    }

    /// Ordinals reached by an edge from `ordinal`, ascending.
    pub fn successor_ordinals(&self, ordinal: usize) -> &[usize] {
        &self.succs[ordinal]
    }

    pub fn direct_predecessors(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        let y = self.ordinal_of(id)?;
        Ok(self.preds[y]
            .iter()
            .map(|&x| self.nodes[x].id.as_str())
            .collect())
    }

    /// Every node with a path of at least one edge into some seed, excluding
    /// the seeds themselves, in ordinal order.
    pub fn ancestors(&self, ids: &[&str]) -> Result<Vec<&str>, GraphError> {
        let seeds = ids
            .iter()
            .map(|id| self.ordinal_of(id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .ancestor_ordinals(&seeds)
            .into_iter()
            .map(|x| self.nodes[x].id.as_str())
            .collect())
    }

    pub(crate) fn ancestor_ordinals(&self, seeds: &[usize]) -> Vec<usize> {
        let limit = seeds.iter().copied().max().unwrap_or(0);
        (0..limit)
            .filter(|x| !seeds.contains(x))
            .filter(|&x| seeds.iter().any(|&s| self.reaches(x, s)))
            .collect()
    }

    fn reaches(&self, x: usize, y: usize) -> bool {
        x != y && self.dist[x * self.nodes.len() + y] != UNREACHABLE
    }

    /// Whether a directed path of one or more edges leads from `x` to `y`.
    pub fn connected(&self, x: &str, y: &str) -> Result<bool, GraphError> {
        Ok(self.reaches(self.ordinal_of(x)?, self.ordinal_of(y)?))
    }

    /// Shortest path length in edges; `Some(0)` when `x == y`.
    pub fn distance(&self, x: &str, y: &str) -> Result<Option<u32>, GraphError> {
        Ok(self.distance_between(self.ordinal_of(x)?, self.ordinal_of(y)?))
    }

    pub fn distance_between(&self, x: usize, y: usize) -> Option<u32> {
        let d = self.dist[x * self.nodes.len() + y];
        (d != UNREACHABLE).then_some(d)
    }

    /// Nodes needed to judge `id` on its own, in ordinal order.
    pub fn evaluation_context(
        &self,
        id: &str,
        mode: ContextMode,
    ) -> Result<Vec<&Node>, GraphError> {
        let y = self.ordinal_of(id)?;
        let ordinals = match mode {
            ContextMode::Direct => self.preds[y].clone(),
            ContextMode::Closure => self.ancestor_ordinals(&[y]),
        };
        Ok(ordinals.into_iter().map(|x| &self.nodes[x]).collect())
    }

    /// Ordinal range of the conclusion run, if any.
    pub fn conclusion_run(&self) -> Option<Range<usize>> {
        let first = self
            .nodes
            .iter()
            .position(|n| n.label == NodeLabel::Conclusion)?;
        let len = self.nodes[first..]
            .iter()
            .take_while(|n| n.label == NodeLabel::Conclusion)
            .count();
        Some(first..first + len)
    }

    /// Restricts the graph to the conclusion run, its ancestors and all
    /// context nodes.
    pub fn compress_to_conclusion(&self) -> Result<Compression, GraphError> {
        let run = self.conclusion_run().ok_or(GraphError::NoConclusion)?;
        let seeds: Vec<usize> = run.clone().collect();
        let mut keep = vec![false; self.nodes.len()];
        for x in self.ancestor_ordinals(&seeds).into_iter().chain(run) {
            keep[x] = true;
        }
        for node in &self.nodes {
            if node.label == NodeLabel::Context {
                keep[node.ordinal] = true;
            }
        }

        let generated = |n: &&Node| n.label.is_generated();
        let total = self.nodes.iter().filter(generated).count();
        let kept = self
            .nodes
            .iter()
            .filter(generated)
            .filter(|n| keep[n.ordinal])
            .count();

        let mut doc = AnnotationDocument {
            meta: self.meta.clone(),
            ..Default::default()
        };
        for node in self.nodes.iter().filter(|n| keep[n.ordinal]) {
            doc.node(&node.id, node.label.as_str(), &node.text);
        }
        for edge in self.edges.iter().filter(|e| keep[e.src] && keep[e.dst]) {
            doc.edge(
                &self.nodes[edge.src].id,
                &self.nodes[edge.dst].id,
                edge.label.as_str(),
            );
        }
        let graph = build_graph(&doc, self.strictness)
            .expect("an ancestor-closed induced subgraph of a valid graph is valid");
        Ok(Compression { graph, kept, total })
    }

    /// The graph as a document: nodes in ordinal order, edges in canonical order.
    pub fn to_document(&self) -> AnnotationDocument {
        let mut doc = AnnotationDocument {
            meta: self.meta.clone(),
            ..Default::default()
        };
        for node in &self.nodes {
            doc.node(&node.id, node.label.as_str(), &node.text);
        }
        for edge in &self.edges {
            doc.edge(
                &self.nodes[edge.src].id,
                &self.nodes[edge.dst].id,
                edge.label.as_str(),
            );
        }
        doc
    }
}
