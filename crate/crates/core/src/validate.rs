//! Validation findings and the edge endpoint-compatibility rules.

use std::fmt;

use crate::graph::FlowGraph;
use crate::label::{EdgeLabel, NodeLabel};

/// Stable rule identifiers reported in [`Violation::rule`].
pub mod rules {
    pub const EMPTY_NODE_ID: &str = "empty-node-id";
    pub const DUPLICATE_NODE_ID: &str = "duplicate-node-id";
    pub const UNKNOWN_NODE_LABEL: &str = "unknown-node-label";
    pub const UNKNOWN_EDGE_LABEL: &str = "unknown-edge-label";
    pub const DANGLING_EDGE: &str = "dangling-edge";
    pub const EDGE_DIRECTION: &str = "edge-direction";
    pub const SELF_LOOP: &str = "self-loop";
    pub const CONCLUSION_CONTIGUITY: &str = "conclusion-contiguity";
    pub const CONTEXT_ORDER: &str = "context-order";
    pub const CONTEXT_INCOMING: &str = "context-incoming";
    pub const CONTEXT_EDGE: &str = "context-edge";
    pub const DUPLICATE_EDGE: &str = "duplicate-edge";
    pub const MULTI_LABEL_PAIR: &str = "multi-label-pair";
    pub const EMPTY_TEXT: &str = "empty-text";

    pub const ENDPOINT_FRONTIER_PLAN: &str = "endpoint-frontier-plan";
    pub const ENDPOINT_FRONTIER_VERIFY: &str = "endpoint-frontier-verify";
    pub const ENDPOINT_PLAN_SUBPLAN: &str = "endpoint-plan-subplan";
    pub const ENDPOINT_PLAN_NEXT_PLAN: &str = "endpoint-plan-next-plan";
    pub const ENDPOINT_PLAN_ALTERNATIVE: &str = "endpoint-plan-alternative";
    pub const ENDPOINT_PLAN_STEP: &str = "endpoint-plan-step";
    pub const ENDPOINT_RESTATEMENT: &str = "endpoint-restatement";
    pub const ENDPOINT_CONCEPT_EXAMPLE: &str = "endpoint-concept-example";
    pub const CONCEPT_EXAMPLE_BETWEEN_FACTS: &str = "concept-example-between-facts";
    pub const ENDPOINT_FACT_DETAIL: &str = "endpoint-fact-detail";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// How endpoint-compatibility findings are graded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    Strict,
    #[default]
    Lenient,
}

impl Strictness {
    fn severity(self) -> Severity {
        match self {
            Strictness::Strict => Severity::Error,
            Strictness::Lenient => Severity::Warning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub severity: Severity,
    pub message: String,
    /// Node ids involved, in the order the message mentions them.
    pub ids: Vec<String>,
    /// Document positions of the involved nodes or edges; used for ordering.
    pub positions: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.severity, self.rule, self.message)?;
        if !self.ids.is_empty() {
            write!(f, " ({})", self.ids.join(", "))?;
        }
        Ok(())
    }
}

/// Findings sorted by rule id, then by position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(
        &mut self,
        rule: &'static str,
        severity: Severity,
        message: impl Into<String>,
        ids: &[&str],
        positions: &[usize],
    ) {
        self.violations.push(Violation {
            rule,
            severity,
            message: message.into(),
            ids: ids.iter().map(|s| s.to_string()).collect(),
            positions: positions.to_vec(),
        });
    }

    pub(crate) fn sorted(mut self) -> Self {
        self.violations.sort_by(|a, b| {
            (a.rule, &a.positions, a.severity, &a.message, &a.ids).cmp(&(
                b.rule,
                &b.positions,
                b.severity,
                &b.message,
                &b.ids,
            ))
        });
        self
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct rule ids, in report order.
    pub fn rule_ids(&self) -> Vec<&'static str> {
        let mut ids: Vec<&'static str> = self.violations.iter().map(|v| v.rule).collect();
        ids.dedup();
        ids
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks one edge against the endpoint-compatibility matrix.
///
/// Evaluation edges (support, refute, uncertainty), premise-conclusion and
/// correction edges accept any endpoints.
pub(crate) fn endpoint_finding(
    src: NodeLabel,
    dst: NodeLabel,
    label: EdgeLabel,
) -> Option<(&'static str, String)> {
    use NodeLabel::{Example, Fact, Planning, Restatement};

    let need = |ok: bool, rule: &'static str, msg: &str| (!ok).then(|| (rule, msg.to_string()));
    match label {
        EdgeLabel::FrontierPlan => need(
            dst == Planning,
            rules::ENDPOINT_FRONTIER_PLAN,
            "frontier-plan edge must end at planning node",
        ),
        EdgeLabel::FrontierVerify => need(
            dst == Planning,
            rules::ENDPOINT_FRONTIER_VERIFY,
            "frontier-verify edge must end at planning node",
        ),
        EdgeLabel::PlanSubplan => need(
            src == Planning && dst == Planning,
            rules::ENDPOINT_PLAN_SUBPLAN,
            "plan-subplan edge must connect two planning nodes",
        ),
        EdgeLabel::PlanNextPlan => need(
            src == Planning && dst == Planning,
            rules::ENDPOINT_PLAN_NEXT_PLAN,
            "plan-next-plan edge must connect two planning nodes",
        ),
        EdgeLabel::PlanAlternative => need(
            src == Planning && dst == Planning,
            rules::ENDPOINT_PLAN_ALTERNATIVE,
            "plan-alternative edge must connect two planning nodes",
        ),
        EdgeLabel::PlanStep => need(
            src == Planning,
            rules::ENDPOINT_PLAN_STEP,
            "plan-step edge must start at planning node",
        ),
        EdgeLabel::Restatement => need(
            dst == Restatement,
            rules::ENDPOINT_RESTATEMENT,
            "restatement edge must end at restatement node",
        ),
        EdgeLabel::ConceptExample if src == Fact && dst == Fact => Some((
            rules::CONCEPT_EXAMPLE_BETWEEN_FACTS,
            "concept-example edge between two fact nodes should be fact-detail".to_string(),
        )),
        EdgeLabel::ConceptExample => need(
            dst == Example,
            rules::ENDPOINT_CONCEPT_EXAMPLE,
            "concept-example edge must end at example node",
        ),
        EdgeLabel::FactDetail => need(
            src == Fact && dst == Fact,
            rules::ENDPOINT_FACT_DETAIL,
            "fact-detail edge must connect two fact nodes",
        ),
        EdgeLabel::PremiseConclusion
        | EdgeLabel::Correction
        | EdgeLabel::Support
        | EdgeLabel::Refute
        | EdgeLabel::Uncertainty => None,
    }
}

/// Endpoint-compatibility findings for a constructed graph.
///
/// Strict mode grades findings as errors, lenient mode as warnings.
pub fn validate_labels(graph: &FlowGraph, strictness: Strictness) -> ValidationReport {
    let mut report = ValidationReport::new();
    for edge in graph.edges() {
        let (src, dst) = (graph.node(edge.src), graph.node(edge.dst));
        if let Some((rule, message)) = endpoint_finding(src.label, dst.label, edge.label) {
            report.push(
                rule,
                strictness.severity(),
                message,
                &[&src.id, &dst.id],
                &[edge.src, edge.dst],
            );
        }
    }
    report.sorted()
}

pub(crate) fn matrix_severity(strictness: Strictness) -> Severity {
    strictness.severity()
}
