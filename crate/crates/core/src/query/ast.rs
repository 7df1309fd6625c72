use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::error::{QueryError, QueryErrorKind};

/// Built-in predicates and their arities. These are materialized from the
/// graph and cannot appear in a rule head.
pub const BUILTINS: [(&str, usize); 5] = [
    ("node", 2),
    ("edge", 3),
    ("connected", 2),
    ("distance", 3),
    ("order", 2),
];

/// Largest arity accepted for any predicate.
pub const MAX_ARITY: usize = 32;

pub fn builtin_arity(name: &str) -> Option<usize> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|&(_, a)| a)
}

/// A ground constant. Node ids and labels are strings; ordinals and
/// distances are integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Str(Arc<str>),
}

impl Value {
    pub fn str(s: &str) -> Self {
        Value::Str(Arc::from(s))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

/// Line and column (both 1-based) of a syntax element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Value),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(Value::Int(i)) => write!(f, "{i}"),
            Term::Const(Value::Str(s)) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub negated: bool,
    pub pos: Pos,
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}(", self.predicate)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Integers compare numerically and strings lexicographically. Values of
    /// different types never satisfy any comparison.
    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        let ord = match (lhs, rhs) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            _ => return false,
        };
        match self {
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Ne => ord.is_ne(),
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Atom(Atom),
    Compare {
        lhs: Term,
        op: CmpOp,
        rhs: Term,
        pos: Pos,
    },
}

impl Literal {
    pub fn pos(&self) -> Pos {
        match self {
            Literal::Atom(a) => a.pos,
            Literal::Compare { pos, .. } => *pos,
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        match self {
            Literal::Atom(a) => a.vars().collect(),
            Literal::Compare { lhs, rhs, .. } => lhs.var().into_iter().chain(rhs.var()).collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom(a) => write!(f, "{a}"),
            Literal::Compare { lhs, op, rhs, .. } => write!(f, "{lhs} {} {rhs}", op.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    /// Variables of the head, first occurrence order.
    pub fn head_vars(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for v in self.head.vars() {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

/// A checked rule set.
///
/// Every rule is safe, arities agree, heads never name a built-in, and
/// negation applies only to built-ins, so the program has a unique least
/// model. Derived predicates are grouped into strata: mutually recursive
/// components listed so that each depends only on earlier ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryProgram {
    rules: Vec<Rule>,
    arities: BTreeMap<String, usize>,
    strata: Vec<Vec<String>>,
}

impl QueryProgram {
    pub fn new(rules: Vec<Rule>) -> Result<Self, QueryError> {
        if rules.is_empty() {
            return Err(QueryError::new(
                QueryErrorKind::Syntax,
                "program has no rules",
                Pos { line: 1, column: 1 },
            ));
        }
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        for rule in &rules {
            let head = &rule.head;
            if builtin_arity(&head.predicate).is_some() {
                return Err(QueryError::new(
                    QueryErrorKind::Reserved,
                    format!(
                        "`{}` is a built-in predicate and cannot be defined",
                        head.predicate
                    ),
                    head.pos,
                ));
            }
            check_arity(&mut arities, head)?;
        }
        for rule in &rules {
            for lit in &rule.body {
                match lit {
                    Literal::Atom(atom) => {
                        if let Some(arity) = builtin_arity(&atom.predicate) {
                            if atom.args.len() != arity {
                                return Err(arity_error(atom, arity));
                            }
                        } else if let Some(&arity) = arities.get(&atom.predicate) {
                            if atom.args.len() != arity {
                                return Err(arity_error(atom, arity));
                            }
                            if atom.negated {
                                return Err(QueryError::new(
                                    QueryErrorKind::Negation,
                                    format!(
                                        "cannot negate derived predicate `{}`; negation is \
                                         limited to built-in predicates",
                                        atom.predicate
                                    ),
                                    atom.pos,
                                ));
                            }
                        } else {
                            return Err(QueryError::new(
                                QueryErrorKind::Undefined,
                                format!("undefined predicate `{}`", atom.predicate),
                                atom.pos,
                            ));
                        }
                    }
                    Literal::Compare { lhs, op, rhs, pos } => {
                        if let (Term::Const(a), Term::Const(b)) = (lhs, rhs) {
                            if std::mem::discriminant(a) != std::mem::discriminant(b) {
                                return Err(QueryError::new(
                                    QueryErrorKind::Type,
                                    format!(
                                        "cannot compare {lhs} {} {rhs}: integer and string",
                                        op.as_str()
                                    ),
                                    *pos,
                                ));
                            }
                        }
                    }
                }
            }
            check_safety(rule)?;
        }
        let strata = stratify(&rules, &arities);
        Ok(QueryProgram {
            rules,
            arities,
            strata,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Derived predicate names with their arities, sorted by name.
    pub fn derived(&self) -> &BTreeMap<String, usize> {
        &self.arities
    }

    pub fn strata(&self) -> &[Vec<String>] {
        &self.strata
    }
}

impl fmt::Display for QueryProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

fn arity_error(atom: &Atom, expected: usize) -> QueryError {
    QueryError::new(
        QueryErrorKind::Arity,
        format!(
            "`{}` used with {} arguments, expected {}",
            atom.predicate,
            atom.args.len(),
            expected
        ),
        atom.pos,
    )
}

fn check_arity(arities: &mut BTreeMap<String, usize>, atom: &Atom) -> Result<(), QueryError> {
    if atom.args.len() > MAX_ARITY {
        return Err(QueryError::new(
            QueryErrorKind::Arity,
            format!("`{}` has more than {MAX_ARITY} arguments", atom.predicate),
            atom.pos,
        ));
    }
    match arities.get(&atom.predicate) {
        Some(&arity) if arity != atom.args.len() => Err(arity_error(atom, arity)),
        Some(_) => Ok(()),
        None => {
            arities.insert(atom.predicate.clone(), atom.args.len());
            Ok(())
        }
    }
}

fn check_safety(rule: &Rule) -> Result<(), QueryError> {
    let bound: BTreeSet<&str> = rule
        .body
        .iter()
        .filter_map(|lit| match lit {
            Literal::Atom(a) if !a.negated => Some(a.vars()),
            _ => None,
        })
        .flatten()
        .collect();
    let unsafe_var = |vars: Vec<&str>, pos: Pos, what: &str| -> Result<(), QueryError> {
        match vars.into_iter().find(|v| !bound.contains(v)) {
            Some(v) => Err(QueryError::new(
                QueryErrorKind::Unsafe,
                format!(
                    "unsafe rule: variable `{v}` in {what} is not bound by a positive body atom"
                ),
                pos,
            )),
            None => Ok(()),
        }
    };
    unsafe_var(rule.head.vars().collect(), rule.head.pos, "the head")?;
    for lit in &rule.body {
        match lit {
            Literal::Atom(a) if a.negated => {
                unsafe_var(a.vars().collect(), a.pos, "a negated atom")?
            }
            Literal::Compare { pos, .. } => unsafe_var(lit.vars(), *pos, "a comparison")?,
            Literal::Atom(_) => {}
        }
    }
    Ok(())
}

/// Strongly connected components of the positive dependency graph among
/// derived predicates, dependencies first (Tarjan's algorithm).
fn stratify(rules: &[Rule], arities: &BTreeMap<String, usize>) -> Vec<Vec<String>> {
    let names: Vec<&str> = arities.keys().map(String::as_str).collect();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); names.len()];
    for rule in rules {
        let head = index[rule.head.predicate.as_str()];
        for lit in &rule.body {
            if let Literal::Atom(a) = lit {
                if let Some(&d) = index.get(a.predicate.as_str()) {
                    deps[head].insert(d);
                }
            }
        }
    }

    struct Tarjan<'a> {
        deps: &'a [BTreeSet<usize>],
        counter: usize,
        order: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.order[v] = Some(self.counter);
            self.low[v] = self.counter;
            self.counter += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for &w in self.deps[v].iter() {
                match self.order[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(ow) if self.on_stack[w] => self.low[v] = self.low[v].min(ow),
                    Some(_) => {}
                }
            }
            if Some(self.low[v]) == self.order[v] {
                let mut component = Vec::new();
                loop {
                    let w = self.stack.pop().expect("component root is on the stack");
                    self.on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                self.out.push(component);
            }
        }
    }

    let n = names.len();
    let mut t = Tarjan {
        deps: &deps,
        counter: 0,
        order: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if t.order[v].is_none() {
            t.visit(v);
        }
    }
    t.out
        .into_iter()
        .map(|c| c.into_iter().map(|i| names[i].to_string()).collect())
        .collect()
}
