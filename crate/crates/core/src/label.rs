//! Closed label vocabularies for nodes and edges.
//!
//! Labels are identified on disk and in query programs by lowercase
//! kebab-case strings. Parsing any other string fails.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} label `{value}`")]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub value: String,
}

/// Semantic role of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    Context,
    Planning,
    Fact,
    Reasoning,
    Restatement,
    Assumption,
    Example,
    Reflection,
    Conclusion,
}

impl NodeLabel {
    pub const ALL: [NodeLabel; 9] = [
        NodeLabel::Context,
        NodeLabel::Planning,
        NodeLabel::Fact,
        NodeLabel::Reasoning,
        NodeLabel::Restatement,
        NodeLabel::Assumption,
        NodeLabel::Example,
        NodeLabel::Reflection,
        NodeLabel::Conclusion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeLabel::Context => "context",
            NodeLabel::Planning => "planning",
            NodeLabel::Fact => "fact",
            NodeLabel::Reasoning => "reasoning",
            NodeLabel::Restatement => "restatement",
            NodeLabel::Assumption => "assumption",
            NodeLabel::Example => "example",
            NodeLabel::Reflection => "reflection",
            NodeLabel::Conclusion => "conclusion",
        }
    }

    /// Context nodes hold the prompt; every other label marks generated text.
    pub fn is_generated(self) -> bool {
        self != NodeLabel::Context
    }
}

impl FromStr for NodeLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownLabel {
                kind: "node",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coarse grouping of edge labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeCategory {
    Planning,
    Reasoning,
    Evaluation,
}

impl EdgeCategory {
    pub const ALL: [EdgeCategory; 3] = [
        EdgeCategory::Planning,
        EdgeCategory::Reasoning,
        EdgeCategory::Evaluation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeCategory::Planning => "planning",
            EdgeCategory::Reasoning => "reasoning",
            EdgeCategory::Evaluation => "evaluation",
        }
    }
}

impl fmt::Display for EdgeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relation carried by an edge. Ordering follows the canonical string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    FrontierPlan,
    FrontierVerify,
    PlanSubplan,
    PlanNextPlan,
    PlanAlternative,
    PremiseConclusion,
    PlanStep,
    ConceptExample,
    FactDetail,
    Restatement,
    Correction,
    Support,
    Refute,
    Uncertainty,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 14] = [
        EdgeLabel::FrontierPlan,
        EdgeLabel::FrontierVerify,
        EdgeLabel::PlanSubplan,
        EdgeLabel::PlanNextPlan,
        EdgeLabel::PlanAlternative,
        EdgeLabel::PremiseConclusion,
        EdgeLabel::PlanStep,
        EdgeLabel::ConceptExample,
        EdgeLabel::FactDetail,
        EdgeLabel::Restatement,
        EdgeLabel::Correction,
        EdgeLabel::Support,
        EdgeLabel::Refute,
        EdgeLabel::Uncertainty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::FrontierPlan => "frontier-plan",
            EdgeLabel::FrontierVerify => "frontier-verify",
            EdgeLabel::PlanSubplan => "plan-subplan",
            EdgeLabel::PlanNextPlan => "plan-next-plan",
            EdgeLabel::PlanAlternative => "plan-alternative",
            EdgeLabel::PremiseConclusion => "premise-conclusion",
            EdgeLabel::PlanStep => "plan-step",
            EdgeLabel::ConceptExample => "concept-example",
            EdgeLabel::FactDetail => "fact-detail",
            EdgeLabel::Restatement => "restatement",
            EdgeLabel::Correction => "correction",
            EdgeLabel::Support => "support",
            EdgeLabel::Refute => "refute",
            EdgeLabel::Uncertainty => "uncertainty",
        }
    }

    pub fn category(self) -> EdgeCategory {
        use EdgeLabel::*;
        match self {
            FrontierPlan | FrontierVerify | PlanSubplan | PlanNextPlan | PlanAlternative => {
                EdgeCategory::Planning
            }
            PremiseConclusion | PlanStep | ConceptExample | FactDetail | Restatement
            | Correction => EdgeCategory::Reasoning,
            Support | Refute | Uncertainty => EdgeCategory::Evaluation,
        }
    }
}

impl FromStr for EdgeLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownLabel {
                kind: "edge",
                value: s.to_string(),
            })
    }
}

impl PartialOrd for EdgeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_str().cmp(other.as_str())
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
