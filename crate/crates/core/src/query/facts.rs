//! Materialized base relations for a graph.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::Value;
use super::parser::BaseFacts;
use crate::graph::FlowGraph;

pub(crate) type Tuple = Box<[Value]>;

#[derive(Debug, Clone, Default)]
struct Index {
    upto: usize,
    map: HashMap<Box<[Value]>, Vec<u32>>,
}

/// A set of equal-arity tuples in insertion order, with lazily built hash
/// indexes keyed by the bound argument positions.
#[derive(Debug, Clone, Default)]
pub struct Relation {
    tuples: Vec<Tuple>,
    set: HashSet<Tuple>,
    indexes: HashMap<u32, Index>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        self.set.contains(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Value]> {
        self.tuples.iter().map(|t| &t[..])
    }

    pub(crate) fn insert(&mut self, tuple: Tuple) -> bool {
        if self.set.contains(&tuple) {
            return false;
        }
        self.set.insert(tuple.clone());
        self.tuples.push(tuple);
        true
    }

    pub(crate) fn tuple(&self, i: u32) -> &[Value] {
        &self.tuples[i as usize]
    }

    /// Brings the index over `mask` up to date with every stored tuple.
    pub(crate) fn ensure_index(&mut self, mask: u32) {
        if mask == 0 {
            return;
        }
        let index = self.indexes.entry(mask).or_default();
        for (i, tuple) in self.tuples.iter().enumerate().skip(index.upto) {
            index
                .map
                .entry(project(tuple, mask))
                .or_default()
                .push(i as u32);
        }
        index.upto = self.tuples.len();
    }

    /// Positions of tuples whose `mask` columns equal `key`. The index must
    /// have been prepared with [`Relation::ensure_index`].
    pub(crate) fn lookup(&self, mask: u32, key: &[Value]) -> &[u32] {
        self.indexes
            .get(&mask)
            .expect("index prepared before lookup")
            .map
            .get(key)
            .map_or(&[], Vec::as_slice)
    }
}

fn project(tuple: &[Value], mask: u32) -> Box<[Value]> {
    tuple
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, v)| v.clone())
        .collect()
}

/// Named relations available to a query.
#[derive(Debug, Clone, Default)]
pub struct FactBase {
    relations: BTreeMap<String, Relation>,
}

impl FactBase {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub(crate) fn relation_mut(&mut self, name: &str) -> &mut Relation {
        self.relations.entry(name.to_string()).or_default()
    }

    pub fn insert(&mut self, name: &str, tuple: Vec<Value>) -> bool {
        self.relation_mut(name).insert(tuple.into_boxed_slice())
    }
}

/// Materializes `node/2`, `edge/3`, `connected/2`, `distance/3` and `order/2`.
///
/// `connected` is irreflexive reachability over one or more edges.
/// `distance` holds the shortest path length in edges for every reachable
/// pair, including `distance(x, x, 0)`.
pub fn ground_facts(graph: &FlowGraph) -> FactBase {
    let mut base = FactBase::default();
    for name in ["node", "edge", "connected", "distance", "order"] {
        base.relation_mut(name);
    }
    let ids: Vec<Value> = graph.nodes().iter().map(|n| Value::str(&n.id)).collect();
    let node_labels: HashMap<&str, Value> = crate::label::NodeLabel::ALL
        .iter()
        .map(|l| (l.as_str(), Value::str(l.as_str())))
        .collect();
    for node in graph.nodes() {
        let id = ids[node.ordinal].clone();
        base.insert(
            "node",
            vec![id.clone(), node_labels[node.label.as_str()].clone()],
        );
        base.insert("order", vec![id, Value::Int(node.ordinal as i64)]);
    }
    for edge in graph.edges() {
        base.insert(
            "edge",
            vec![
                ids[edge.src].clone(),
                ids[edge.dst].clone(),
                Value::str(edge.label.as_str()),
            ],
        );
    }
    for x in 0..graph.len() {
        for y in x..graph.len() {
            if let Some(d) = graph.distance_between(x, y) {
                base.insert(
                    "distance",
                    vec![ids[x].clone(), ids[y].clone(), Value::Int(d as i64)],
                );
                if x != y {
                    base.insert("connected", vec![ids[x].clone(), ids[y].clone()]);
                }
            }
        }
    }
    base
}

impl BaseFacts {
    /// The `node/2` and `edge/3` relation of a graph, in export order.
    pub fn from_graph(graph: &FlowGraph) -> Self {
        BaseFacts {
            nodes: graph
                .nodes()
                .iter()
                .map(|n| (n.id.clone(), n.label.as_str().to_string()))
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| {
                    (
                        graph.node(e.src).id.clone(),
                        graph.node(e.dst).id.clone(),
                        e.label.as_str().to_string(),
                    )
                })
                .collect(),
        }
    }
}
