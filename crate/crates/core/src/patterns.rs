//! Named reasoning patterns, each a query program with one head predicate.
//!
//! Pattern files are ordinary query programs. Lines starting with `%!` carry
//! metadata and are comments to any other reader:
//!
//! ```text
//! %! description: A plan is abandoned in favour of an alternative plan.
//! %! role P: abandoned plan
//! %! role Q: alternative plan
//! backtracking(P, Q) :- edge(P, Q, "plan-alternative").
//! ```
//!
//! Roles are listed in head-argument order and name what each matched node
//! plays in the pattern.

use thiserror::Error;

use crate::graph::FlowGraph;
use crate::query::{evaluate, parse_query, MatchSet, QueryError, QueryProgram};

const BUILTIN_SOURCES: [(&str, &str); 6] = [
    (
        "verification",
        include_str!("../patterns/verification.flowq"),
    ),
    (
        "deductive-chain",
        include_str!("../patterns/deductive-chain.flowq"),
    ),
    (
        "inductive-reasoning",
        include_str!("../patterns/inductive-reasoning.flowq"),
    ),
    (
        "proof-by-contradiction",
        include_str!("../patterns/proof-by-contradiction.flowq"),
    ),
    (
        "backtracking",
        include_str!("../patterns/backtracking.flowq"),
    ),
    ("correction", include_str!("../patterns/correction.flowq")),
];

#[derive(Debug, Error)]
pub enum PatternError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("pattern `{0}` must define a predicate of the same name")]
    MissingHead(String),
    #[error("pattern `{name}` defines {found} predicates; exactly one is allowed")]
    ExtraPredicates { name: String, found: usize },
    #[error("pattern `{name}` lists {roles} roles for a head of arity {arity}")]
    RoleCount {
        name: String,
        roles: usize,
        arity: usize,
    },
    #[error("malformed metadata line `{0}`")]
    Metadata(String),
}

#[derive(Debug, Clone)]
pub struct PatternDef {
    pub name: String,
    pub description: String,
    pub program: QueryProgram,
    /// (head variable, role) pairs in head-argument order.
    pub roles: Vec<(String, String)>,
}

impl PatternDef {
    /// Builds a pattern from query source with `%!` metadata lines.
    pub fn from_source(name: &str, source: &str) -> Result<Self, PatternError> {
        let mut description = String::new();
        let mut roles = Vec::new();
        for line in source.lines() {
            let Some(meta) = line.trim_start().strip_prefix("%!") else {
                continue;
            };
            let meta = meta.trim();
            if let Some(text) = meta.strip_prefix("description:") {
                description = text.trim().to_string();
            } else if let Some(rest) = meta.strip_prefix("role ") {
                let (var, role) = rest
                    .split_once(':')
                    .ok_or_else(|| PatternError::Metadata(line.to_string()))?;
                roles.push((var.trim().to_string(), role.trim().to_string()));
            } else {
                return Err(PatternError::Metadata(line.to_string()));
            }
        }

        let program = parse_query(source)?;
        let arity = *program
            .derived()
            .get(name)
            .ok_or_else(|| PatternError::MissingHead(name.to_string()))?;
        if program.derived().len() != 1 {
            return Err(PatternError::ExtraPredicates {
                name: name.to_string(),
                found: program.derived().len(),
            });
        }
        if roles.len() != arity {
            return Err(PatternError::RoleCount {
                name: name.to_string(),
                roles: roles.len(),
                arity,
            });
        }
        Ok(PatternDef {
            name: name.to_string(),
            description,
            program,
            roles,
        })
    }

    pub fn role_labels(&self) -> Vec<&str> {
        self.roles.iter().map(|(_, r)| r.as_str()).collect()
    }
}

/// The shipped patterns, in a fixed order.
pub fn builtin_patterns() -> Vec<PatternDef> {
    BUILTIN_SOURCES
        .iter()
        .map(|(name, src)| {
            PatternDef::from_source(name, src).expect("shipped pattern files are valid")
        })
        .collect()
}

pub fn builtin_pattern(name: &str) -> Option<PatternDef> {
    builtin_patterns().into_iter().find(|p| p.name == name)
}

pub fn builtin_pattern_names() -> Vec<&'static str> {
    BUILTIN_SOURCES.iter().map(|(n, _)| *n).collect()
}

/// Matches of one pattern, each tuple position paired with its role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub pattern: String,
    pub roles: Vec<String>,
    pub matches: MatchSet,
}

impl Detection {
    /// Rows of (role, node id) pairs.
    pub fn annotated(&self) -> Vec<Vec<(&str, String)>> {
        self.matches
            .rows()
            .into_iter()
            .map(|row| self.roles.iter().map(String::as_str).zip(row).collect())
            .collect()
    }
}

pub fn detect(pattern: &PatternDef, graph: &FlowGraph) -> Detection {
    let matches = evaluate(&pattern.program, graph)
        .into_iter()
        .find(|m| m.predicate == pattern.name)
        .expect("pattern head is its only derived predicate");
    Detection {
        pattern: pattern.name.clone(),
        roles: pattern
            .role_labels()
            .into_iter()
            .map(String::from)
            .collect(),
        matches,
    }
}
