//! Recursive-descent parser for query programs and fact files.

use super::ast::{Atom, Literal, Pos, QueryProgram, Rule, Term, Value};
use super::error::{QueryError, QueryErrorKind};
use super::lexer::{tokenize, Tok};

/// Parses and checks a query program.
pub fn parse_query(text: &str) -> Result<QueryProgram, QueryError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    while !p.at(&Tok::Eof) {
        rules.push(p.rule()?);
    }
    QueryProgram::new(rules)
}

/// Base relation read back from a fact file: `node/2` and `edge/3` tuples in
/// file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BaseFacts {
    pub nodes: Vec<(String, String)>,
    pub edges: Vec<(String, String, String)>,
}

/// Reads a fact file of `node(id, "label").` and `edge(src, dst, "label").`
/// lines. Ids may be bare atoms or quoted strings.
pub fn read_facts(text: &str) -> Result<BaseFacts, QueryError> {
    let mut p = Parser::new(text)?;
    let mut facts = BaseFacts::default();
    while !p.at(&Tok::Eof) {
        let (name, pos) = p.ident()?;
        p.expect(Tok::LParen)?;
        let mut args = vec![p.symbol()?];
        while p.eat(&Tok::Comma) {
            args.push(p.symbol()?);
        }
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
        match (name.as_str(), args.len()) {
            ("node", 2) => {
                let label = args.pop().unwrap();
                facts.nodes.push((args.pop().unwrap(), label));
            }
            ("edge", 3) => {
                let label = args.pop().unwrap();
                let dst = args.pop().unwrap();
                facts.edges.push((args.pop().unwrap(), dst, label));
            }
            _ => {
                return Err(QueryError::new(
                    QueryErrorKind::Undefined,
                    format!("unexpected fact `{name}/{}`", args.len()),
                    pos,
                ))
            }
        }
    }
    Ok(facts)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, QueryError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let item = self.toks[self.at].clone();
        if item.0 != Tok::Eof {
            self.at += 1;
        }
        item
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> QueryError {
        QueryError::new(
            QueryErrorKind::Syntax,
            format!("expected {wanted}, found {}", self.peek().describe()),
            self.pos(),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), QueryError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QueryError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let pos = self.pos();
                self.advance();
                Ok((name, pos))
            }
            _ => Err(self.unexpected("a predicate name")),
        }
    }

    fn symbol(&mut self) -> Result<String, QueryError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("an atom or string")),
        }
    }

    fn rule(&mut self) -> Result<Rule, QueryError> {
        let head = self.atom(false)?;
        self.expect(Tok::If)?;
        let mut body = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            body.push(self.literal()?);
        }
        self.expect(Tok::Dot)?;
        Ok(Rule { head, body })
    }

    fn literal(&mut self) -> Result<Literal, QueryError> {
        match self.peek() {
            Tok::Ident(name) if name == "not" => {
                if matches!(self.toks.get(self.at + 1), Some((Tok::Ident(_), _))) {
                    self.advance();
                    Ok(Literal::Atom(self.atom(true)?))
                } else {
                    Err(QueryError::new(
                        QueryErrorKind::Syntax,
                        "`not` must be followed by an atom",
                        self.pos(),
                    ))
                }
            }
            Tok::Ident(_) => Ok(Literal::Atom(self.atom(false)?)),
            Tok::Var(_) | Tok::Str(_) | Tok::Int(_) => {
                let pos = self.pos();
                let lhs = self.term()?;
                let op = match self.advance() {
                    (Tok::Cmp(op), _) => op,
                    (tok, pos) => {
                        return Err(QueryError::new(
                            QueryErrorKind::Syntax,
                            format!("expected a comparison operator, found {}", tok.describe()),
                            pos,
                        ))
                    }
                };
                let rhs = self.term()?;
                Ok(Literal::Compare { lhs, op, rhs, pos })
            }
            _ => Err(self.unexpected("an atom or comparison")),
        }
    }

    fn atom(&mut self, negated: bool) -> Result<Atom, QueryError> {
        let (predicate, pos) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Atom {
            predicate,
            args,
            negated,
            pos,
        })
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        let term = match self.peek().clone() {
            Tok::Var(v) => Term::Var(v),
            Tok::Str(s) => Term::Const(Value::str(&s)),
            Tok::Int(i) => Term::Const(Value::Int(i)),
            Tok::Ident(_) => {
                return Err(QueryError::new(
                    QueryErrorKind::Syntax,
                    format!(
                        "expected a variable, string or integer, found {}; quote constants",
                        self.peek().describe()
                    ),
                    self.pos(),
                ))
            }
            _ => return Err(self.unexpected("a variable, string or integer")),
        };
        self.advance();
        Ok(term)
    }
}
