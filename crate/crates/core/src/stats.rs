//! Corpus-level label statistics.
//!
//! Context nodes are prompt input, not generated trace, so they are left out
//! of node counts and the node-label histogram. Edge counts include every
//! edge. Percentages and means are kept as exact integer ratios and rounded
//! half-up only when rendered.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::graph::FlowGraph;
use crate::label::{EdgeCategory, EdgeLabel, NodeLabel};

/// Meta key used for the per-domain breakdown.
pub const DOMAIN_KEY: &str = "domain";
pub const UNSPECIFIED_DOMAIN: &str = "unspecified";
pub const CSV_HEADER: &str = "label,category,count,percent";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("corpus is empty")]
    EmptyCorpus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCount {
    pub label: &'static str,
    /// "node" for node labels, the edge category otherwise.
    pub category: &'static str,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainStats {
    pub domain: String,
    pub graphs: u64,
    pub nodes: u64,
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub graphs: u64,
    /// Generated (non-context) nodes.
    pub nodes: u64,
    pub edges: u64,
    pub node_labels: Vec<LabelCount>,
    pub edge_labels: Vec<LabelCount>,
    pub categories: Vec<LabelCount>,
    pub domains: Vec<DomainStats>,
}

/// Rounds `num / den` half-up to `decimals` places.
pub fn fixed(num: u64, den: u64, decimals: u32) -> String {
    if den == 0 {
        return format!("{:.*}", decimals as usize, 0.0);
    }
    let scale = 10u128.pow(decimals);
    let scaled = (2 * num as u128 * scale + den as u128) / (2 * den as u128);
    if decimals == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = decimals as usize
    )
}

/// `100 * count / total` with one decimal.
pub fn percent(count: u64, total: u64) -> String {
    fixed(100 * count, total, 1)
}

pub fn corpus_stats(graphs: &[FlowGraph]) -> Result<CorpusStats, StatsError> {
    if graphs.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let mut node_counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut edge_counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut domains: BTreeMap<String, DomainStats> = BTreeMap::new();
    let (mut nodes, mut edges) = (0u64, 0u64);

    for graph in graphs {
        let generated = graph
            .nodes()
            .iter()
            .filter(|n| n.label.is_generated())
            .inspect(|n| *node_counts.entry(n.label.as_str()).or_default() += 1)
            .count() as u64;
        for edge in graph.edges() {
            *edge_counts.entry(edge.label.as_str()).or_default() += 1;
        }
        nodes += generated;
        edges += graph.edges().len() as u64;

        let domain = graph
            .meta()
            .get(DOMAIN_KEY)
            .cloned()
            .unwrap_or_else(|| UNSPECIFIED_DOMAIN.to_string());
        let entry = domains.entry(domain.clone()).or_insert(DomainStats {
            domain,
            graphs: 0,
            nodes: 0,
            edges: 0,
        });
        entry.graphs += 1;
        entry.nodes += generated;
        entry.edges += graph.edges().len() as u64;
    }

    let node_labels = NodeLabel::ALL
        .into_iter()
        .filter(|l| l.is_generated())
        .map(|l| LabelCount {
            label: l.as_str(),
            category: "node",
            count: node_counts.get(l.as_str()).copied().unwrap_or(0),
        })
        .collect();
    let edge_labels: Vec<LabelCount> = EdgeLabel::ALL
        .into_iter()
        .map(|l| LabelCount {
            label: l.as_str(),
            category: l.category().as_str(),
            count: edge_counts.get(l.as_str()).copied().unwrap_or(0),
        })
        .collect();
    let categories = EdgeCategory::ALL
        .into_iter()
        .map(|c| LabelCount {
            label: c.as_str(),
            category: c.as_str(),
            count: edge_labels
                .iter()
                .filter(|l| l.category == c.as_str())
                .map(|l| l.count)
                .sum(),
        })
        .collect();

    Ok(CorpusStats {
        graphs: graphs.len() as u64,
        nodes,
        edges,
        node_labels,
        edge_labels,
        categories,
        domains: domains.into_values().collect(),
    })
}

impl CorpusStats {
    /// Mean generated nodes per graph, two decimals.
    pub fn mean_nodes(&self) -> String {
        fixed(self.nodes, self.graphs, 2)
    }

    pub fn node_count(&self, label: NodeLabel) -> u64 {
        self.node_labels
            .iter()
            .find(|l| l.label == label.as_str())
            .map_or(0, |l| l.count)
    }

    pub fn edge_count(&self, label: EdgeLabel) -> u64 {
        self.edge_labels
            .iter()
            .find(|l| l.label == label.as_str())
            .map_or(0, |l| l.count)
    }

    /// The `k` most frequent node labels (ties in canonical order) and their
    /// combined count.
    pub fn top_node_labels(&self, k: usize) -> (Vec<&'static str>, u64) {
        let mut ranked: Vec<&LabelCount> = self.node_labels.iter().collect();
        ranked.sort_by_key(|l| std::cmp::Reverse(l.count));
        let top: Vec<&LabelCount> = ranked.into_iter().take(k).collect();
        (
            top.iter().map(|l| l.label).collect(),
            top.iter().map(|l| l.count).sum(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

pub fn report(stats: &CorpusStats, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => table(stats),
        ReportFormat::Csv => csv(stats),
    }
}

fn csv(stats: &CorpusStats) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for l in &stats.node_labels {
        writeln!(
            out,
            "{},{},{},{}",
            l.label,
            l.category,
            l.count,
            percent(l.count, stats.nodes)
        )
        .unwrap();
    }
    for l in &stats.edge_labels {
        writeln!(
            out,
            "{},{},{},{}",
            l.label,
            l.category,
            l.count,
            percent(l.count, stats.edges)
        )
        .unwrap();
    }
    out
}

fn table(stats: &CorpusStats) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(
        w,
        "# context nodes excluded from node counts and the node-label histogram"
    )
    .unwrap();
    writeln!(
        w,
        "graphs: {}\ngenerated nodes: {}\nedges: {}\nmean nodes per graph: {}",
        stats.graphs,
        stats.nodes,
        stats.edges,
        stats.mean_nodes()
    )
    .unwrap();

    writeln!(w, "\n{:<20} {:>8} {:>8}", "node label", "count", "percent").unwrap();
    for l in &stats.node_labels {
        writeln!(
            w,
            "{:<20} {:>8} {:>8}",
            l.label,
            l.count,
            percent(l.count, stats.nodes)
        )
        .unwrap();
    }
    let (top, top_count) = stats.top_node_labels(4);
    writeln!(
        w,
        "top-4 node labels ({}): {}%",
        top.join(", "),
        percent(top_count, stats.nodes)
    )
    .unwrap();

    writeln!(
        w,
        "\n{:<20} {:<11} {:>8} {:>8}",
        "edge label", "category", "count", "percent"
    )
    .unwrap();
    for l in &stats.edge_labels {
        writeln!(
            w,
            "{:<20} {:<11} {:>8} {:>8}",
            l.label,
            l.category,
            l.count,
            percent(l.count, stats.edges)
        )
        .unwrap();
    }

    writeln!(
        w,
        "\n{:<20} {:>8} {:>8}",
        "edge category", "count", "percent"
    )
    .unwrap();
    for c in &stats.categories {
        writeln!(
            w,
            "{:<20} {:>8} {:>8}",
            c.label,
            c.count,
            percent(c.count, stats.edges)
        )
        .unwrap();
    }

    writeln!(
        w,
        "\n{:<20} {:>8} {:>8} {:>8} {:>10}",
        "domain", "graphs", "nodes", "edges", "mean nodes"
    )
    .unwrap();
    for d in &stats.domains {
        writeln!(
            w,
            "{:<20} {:>8} {:>8} {:>8} {:>10}",
            d.domain,
            d.graphs,
            d.nodes,
            d.edges,
            fixed(d.nodes, d.graphs, 2)
        )
        .unwrap();
    }
    out
}
