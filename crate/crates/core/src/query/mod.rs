//! Logic-rule queries over a graph's facts.
//!
//! The language is Datalog: rules with a head atom and a body of atoms and
//! comparisons, positive recursion, and negation restricted to the built-in
//! predicates `node/2`, `edge/3`, `connected/2`, `distance/3` and `order/2`.
//!
//! ```text
//! verify(X, Y, Z) :- node(Y, "planning"), edge(X, Y, "frontier-verify"),
//!                    connected(Y, Z), edge(Z, X, "support").
//! ```

mod ast;
mod error;
mod eval;
mod facts;
mod lexer;
mod parser;

pub use ast::{
    builtin_arity, Atom, CmpOp, Literal, Pos, QueryProgram, Rule, Term, Value, BUILTINS, MAX_ARITY,
};
pub use error::{QueryError, QueryErrorKind};
pub use eval::{evaluate, evaluate_on, evaluate_union, MatchSet, Strategy};
pub use facts::{ground_facts, FactBase, Relation};
pub use parser::{parse_query, read_facts, BaseFacts};
