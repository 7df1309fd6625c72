use std::fmt;

use thiserror::Error;

use super::ast::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryErrorKind {
    Syntax,
    Unsafe,
    Arity,
    Reserved,
    Undefined,
    Negation,
    Type,
    /// Rules passed to a union evaluation do not share one head predicate.
    MixedHeads,
}

impl fmt::Display for QueryErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryErrorKind::Syntax => "syntax error",
            QueryErrorKind::Unsafe => "unsafe rule",
            QueryErrorKind::Arity => "arity mismatch",
            QueryErrorKind::Reserved => "reserved predicate",
            QueryErrorKind::Undefined => "undefined predicate",
            QueryErrorKind::Negation => "unstratified negation",
            QueryErrorKind::Type => "type mismatch",
            QueryErrorKind::MixedHeads => "mixed heads",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at line {}, column {}: {message}", pos.line, pos.column)]
pub struct QueryError {
    pub kind: QueryErrorKind,
    pub message: String,
    pub pos: Pos,
}

impl QueryError {
    pub(crate) fn new(kind: QueryErrorKind, message: impl Into<String>, pos: Pos) -> Self {
        QueryError {
            kind,
            message: message.into(),
            pos,
        }
    }
}
