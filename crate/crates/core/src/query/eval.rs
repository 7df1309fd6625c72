//! Bottom-up evaluation to the least model.
//!
//! Strata are evaluated in dependency order. Within a stratum the default
//! strategy is semi-naive: after the first round, each rule is re-fired once
//! per recursive body atom with that atom restricted to the tuples derived in
//! the previous round. Body atoms are joined greedily, most-bound first, and
//! filters run as soon as their variables are bound.

use std::collections::{BTreeMap, HashMap};

use super::ast::{CmpOp, Literal, QueryProgram, Rule, Term, Value};
use super::error::{QueryError, QueryErrorKind};
use super::facts::{ground_facts, FactBase, Relation, Tuple};
use crate::graph::FlowGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    SemiNaive,
    /// Re-fires every rule against the full relations until nothing changes.
    Naive,
}

/// Deduplicated tuples of one derived predicate, sorted by their rendered
/// constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchSet {
    pub predicate: String,
    pub arity: usize,
    tuples: Vec<Vec<Value>>,
}

impl MatchSet {
    pub fn new(
        predicate: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Value>>,
    ) -> Self {
        let mut keyed: Vec<(Vec<String>, Vec<Value>)> = tuples
            .into_iter()
            .map(|t| (t.iter().map(Value::to_string).collect(), t))
            .collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.1 == b.1);
        MatchSet {
            predicate: predicate.to_string(),
            arity,
            tuples: keyed.into_iter().map(|(_, t)| t).collect(),
        }
    }

    pub fn tuples(&self) -> &[Vec<Value>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tuples rendered as strings.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.tuples
            .iter()
            .map(|t| t.iter().map(Value::to_string).collect())
            .collect()
    }

    pub fn contains_row(&self, row: &[&str]) -> bool {
        self.tuples
            .iter()
            .any(|t| t.len() == row.len() && t.iter().zip(row).all(|(v, r)| v.to_string() == *r))
    }
}

/// Evaluates `program` over the graph's facts. One [`MatchSet`] per derived
/// predicate, sorted by predicate name.
pub fn evaluate(program: &QueryProgram, graph: &FlowGraph) -> Vec<MatchSet> {
    evaluate_on(program, &mut ground_facts(graph), Strategy::SemiNaive)
}

/// Evaluates over an existing fact base. Indexes built along the way are
/// kept on `base`; its tuples are not modified.
pub fn evaluate_on(
    program: &QueryProgram,
    base: &mut FactBase,
    strategy: Strategy,
) -> Vec<MatchSet> {
    let mut derived: HashMap<String, Relation> = program
        .derived()
        .keys()
        .map(|p| (p.clone(), Relation::default()))
        .collect();
    let compiled: Vec<CompiledRule> = program.rules().iter().map(CompiledRule::new).collect();

    for stratum in program.strata() {
        let rules: Vec<&CompiledRule> = compiled
            .iter()
            .filter(|r| stratum.contains(&r.predicate))
            .collect();
        match strategy {
            Strategy::SemiNaive => semi_naive(&rules, stratum, base, &mut derived),
            Strategy::Naive => naive(&rules, base, &mut derived),
        }
    }

    program
        .derived()
        .iter()
        .map(|(pred, &arity)| {
            let rel = &derived[pred];
            MatchSet::new(pred, arity, rel.iter().map(<[Value]>::to_vec))
        })
        .collect()
}

/// Evaluates rules that share one head predicate and returns the union of
/// their matches.
pub fn evaluate_union(rules: Vec<Rule>, graph: &FlowGraph) -> Result<MatchSet, QueryError> {
    let first = rules.first().ok_or_else(|| {
        QueryError::new(QueryErrorKind::Syntax, "no rules given", Default::default())
    })?;
    let (pred, arity) = (first.head.predicate.clone(), first.head.args.len());
    for rule in &rules[1..] {
        if rule.head.predicate != pred {
            return Err(QueryError::new(
                QueryErrorKind::MixedHeads,
                format!("expected head `{pred}`, found `{}`", rule.head.predicate),
                rule.head.pos,
            ));
        }
        if rule.head.args.len() != arity {
            return Err(QueryError::new(
                QueryErrorKind::Arity,
                format!(
                    "`{pred}` defined with {arity} and {} arguments",
                    rule.head.args.len()
                ),
                rule.head.pos,
            ));
        }
    }
    let program = QueryProgram::new(rules)?;
    Ok(evaluate(&program, graph)
        .into_iter()
        .find(|m| m.predicate == pred)
        .expect("head predicate is derived"))
}

#[derive(Debug, Clone)]
enum Arg {
    Var(usize),
    Const(Value),
}

#[derive(Debug, Clone)]
enum Lit {
    Positive { pred: String, args: Vec<Arg> },
    Negative { pred: String, args: Vec<Arg> },
    Compare { lhs: Arg, op: CmpOp, rhs: Arg },
}

impl Lit {
    fn vars(&self) -> Vec<usize> {
        let args: Vec<&Arg> = match self {
            Lit::Positive { args, .. } | Lit::Negative { args, .. } => args.iter().collect(),
            Lit::Compare { lhs, rhs, .. } => vec![lhs, rhs],
        };
        args.into_iter()
            .filter_map(|a| match a {
                Arg::Var(v) => Some(*v),
                Arg::Const(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    predicate: String,
    head: Vec<Arg>,
    body: Vec<Lit>,
    slots: usize,
}

impl CompiledRule {
    fn new(rule: &Rule) -> Self {
        let mut names: Vec<String> = Vec::new();
        let mut arg = |t: &Term| match t {
            Term::Const(v) => Arg::Const(v.clone()),
            Term::Var(name) => Arg::Var(match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.clone());
                    names.len() - 1
                }
            }),
        };
        let body = rule
            .body
            .iter()
            .map(|lit| match lit {
                Literal::Atom(a) => {
                    let args = a.args.iter().map(&mut arg).collect();
                    if a.negated {
                        Lit::Negative {
                            pred: a.predicate.clone(),
                            args,
                        }
                    } else {
                        Lit::Positive {
                            pred: a.predicate.clone(),
                            args,
                        }
                    }
                }
                Literal::Compare { lhs, op, rhs, .. } => Lit::Compare {
                    lhs: arg(lhs),
                    op: *op,
                    rhs: arg(rhs),
                },
            })
            .collect();
        let head = rule.head.args.iter().map(&mut arg).collect();
        CompiledRule {
            predicate: rule.head.predicate.clone(),
            head,
            body,
            slots: names.len(),
        }
    }

    /// Join order for the body. `first` is placed ahead of everything else.
    fn plan(&self, first: Option<usize>) -> Vec<Step> {
        let mut bound = vec![false; self.slots];
        let mut remaining: Vec<usize> = (0..self.body.len()).collect();
        let mut steps = Vec::with_capacity(self.body.len());

        let place = |i: usize, bound: &mut Vec<bool>, steps: &mut Vec<Step>| {
            let mask = match &self.body[i] {
                Lit::Positive { args, .. } => args
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| match a {
                        Arg::Const(_) => true,
                        Arg::Var(v) => bound[*v],
                    })
                    .fold(0u32, |m, (p, _)| m | (1 << p)),
                _ => 0,
            };
            for v in self.body[i].vars() {
                bound[v] = true;
            }
            steps.push(Step { lit: i, mask });
        };

        if let Some(i) = first {
            remaining.retain(|&j| j != i);
            place(i, &mut bound, &mut steps);
        }
        loop {
            // Filters whose variables are all bound.
            while let Some(k) = remaining.iter().position(|&j| {
                !matches!(self.body[j], Lit::Positive { .. })
                    && self.body[j].vars().iter().all(|&v| bound[v])
            }) {
                let j = remaining.remove(k);
                place(j, &mut bound, &mut steps);
            }
            let best = remaining
                .iter()
                .enumerate()
                .filter_map(|(k, &j)| match &self.body[j] {
                    Lit::Positive { args, .. } => {
                        let score = args
                            .iter()
                            .filter(|a| match a {
                                Arg::Const(_) => true,
                                Arg::Var(v) => bound[*v],
                            })
                            .count();
                        Some((score, k))
                    }
                    _ => None,
                })
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            match best {
                Some((_, k)) => {
                    let j = remaining.remove(k);
                    place(j, &mut bound, &mut steps);
                }
                None => break,
            }
        }
        debug_assert!(remaining.is_empty(), "safe rules schedule every literal");
        steps
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    lit: usize,
    mask: u32,
}

/// Where a positive body atom reads its tuples from.
struct Sources<'a> {
    base: &'a FactBase,
    derived: &'a HashMap<String, Relation>,
    delta: Option<(usize, &'a Relation)>,
}

impl<'a> Sources<'a> {
    fn relation(&self, lit: usize, pred: &str) -> Option<&'a Relation> {
        match self.delta {
            Some((i, rel)) if i == lit => Some(rel),
            _ => self.derived.get(pred).or_else(|| self.base.relation(pred)),
        }
    }
}

fn prepare_indexes(
    rule: &CompiledRule,
    steps: &[Step],
    base: &mut FactBase,
    derived: &mut HashMap<String, Relation>,
    delta: Option<(usize, &mut Relation)>,
) {
    let delta_lit = delta.as_ref().map(|(i, _)| *i);
    let mut delta = delta;
    for step in steps {
        let Lit::Positive { pred, .. } = &rule.body[step.lit] else {
            continue;
        };
        if Some(step.lit) == delta_lit {
            if let Some((_, rel)) = delta.as_mut() {
                rel.ensure_index(step.mask);
            }
        } else if let Some(rel) = derived.get_mut(pred) {
            rel.ensure_index(step.mask);
        } else {
            base.relation_mut(pred).ensure_index(step.mask);
        }
    }
}

fn fire(rule: &CompiledRule, steps: &[Step], sources: &Sources, out: &mut Vec<Tuple>) {
    let mut bindings: Vec<Option<Value>> = vec![None; rule.slots];
    join(rule, steps, 0, sources, &mut bindings, out);
}

fn resolve<'v>(arg: &'v Arg, bindings: &'v [Option<Value>]) -> &'v Value {
    match arg {
        Arg::Const(v) => v,
        Arg::Var(s) => bindings[*s].as_ref().expect("variable bound by plan"),
    }
}

fn join(
    rule: &CompiledRule,
    steps: &[Step],
    k: usize,
    sources: &Sources,
    bindings: &mut Vec<Option<Value>>,
    out: &mut Vec<Tuple>,
) {
    let Some(step) = steps.get(k) else {
        out.push(
            rule.head
                .iter()
                .map(|a| resolve(a, bindings).clone())
                .collect(),
        );
        return;
    };
    match &rule.body[step.lit] {
        Lit::Compare { lhs, op, rhs } => {
            if op.holds(resolve(lhs, bindings), resolve(rhs, bindings)) {
                join(rule, steps, k + 1, sources, bindings, out);
            }
        }
        Lit::Negative { pred, args } => {
            let tuple: Vec<Value> = args.iter().map(|a| resolve(a, bindings).clone()).collect();
            let present = sources
                .base
                .relation(pred)
                .is_some_and(|r| r.contains(&tuple));
            if !present {
                join(rule, steps, k + 1, sources, bindings, out);
            }
        }
        Lit::Positive { pred, args } => {
            let Some(rel) = sources.relation(step.lit, pred) else {
                return;
            };
            let mut try_tuple = |tuple: &[Value], bindings: &mut Vec<Option<Value>>| {
                let mut fresh: Vec<usize> = Vec::new();
                let mut ok = true;
                for (arg, value) in args.iter().zip(tuple) {
                    match arg {
                        Arg::Const(c) => ok = c == value,
                        Arg::Var(s) => match &bindings[*s] {
                            Some(b) => ok = b == value,
                            None => {
                                bindings[*s] = Some(value.clone());
                                fresh.push(*s);
                            }
                        },
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    join(rule, steps, k + 1, sources, bindings, out);
                }
                for s in fresh {
                    bindings[s] = None;
                }
            };
            if step.mask == 0 {
                for tuple in rel.iter() {
                    try_tuple(tuple, bindings);
                }
            } else {
                let key: Vec<Value> = args
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| step.mask & (1 << p) != 0)
                    .map(|(_, a)| resolve(a, bindings).clone())
                    .collect();
                for &i in rel.lookup(step.mask, &key) {
                    try_tuple(rel.tuple(i), bindings);
                }
            }
        }
    }
}

fn naive(rules: &[&CompiledRule], base: &mut FactBase, derived: &mut HashMap<String, Relation>) {
    loop {
        let mut produced: Vec<(&str, Vec<Tuple>)> = Vec::new();
        for rule in rules {
            let steps = rule.plan(None);
            prepare_indexes(rule, &steps, base, derived, None);
            let sources = Sources {
                base,
                derived,
                delta: None,
            };
            let mut out = Vec::new();
            fire(rule, &steps, &sources, &mut out);
            produced.push((&rule.predicate, out));
        }
        let mut changed = false;
        for (pred, tuples) in produced {
            let rel = derived.get_mut(pred).expect("head relation exists");
            for t in tuples {
                changed |= rel.insert(t);
            }
        }
        if !changed {
            return;
        }
    }
}

fn semi_naive(
    rules: &[&CompiledRule],
    stratum: &[String],
    base: &mut FactBase,
    derived: &mut HashMap<String, Relation>,
) {
    // First round: everything derivable from the relations available so far.
    let mut fresh: BTreeMap<String, Vec<Tuple>> = BTreeMap::new();
    for rule in rules {
        let steps = rule.plan(None);
        prepare_indexes(rule, &steps, base, derived, None);
        let sources = Sources {
            base,
            derived,
            delta: None,
        };
        let mut out = Vec::new();
        fire(rule, &steps, &sources, &mut out);
        fresh.entry(rule.predicate.clone()).or_default().extend(out);
    }
    let mut delta = absorb(fresh, derived);

    while delta.values().any(|d| !d.is_empty()) {
        let mut fresh: BTreeMap<String, Vec<Tuple>> = BTreeMap::new();
        for rule in rules {
            for (i, lit) in rule.body.iter().enumerate() {
                let Lit::Positive { pred, .. } = lit else {
                    continue;
                };
                if !stratum.contains(pred) {
                    continue;
                }
                let Some(delta_rel) = delta.get_mut(pred) else {
                    continue;
                };
                if delta_rel.is_empty() {
                    continue;
                }
                let steps = rule.plan(Some(i));
                prepare_indexes(rule, &steps, base, derived, Some((i, delta_rel)));
                let sources = Sources {
                    base,
                    derived,
                    delta: Some((i, &delta[pred])),
                };
                let mut out = Vec::new();
                fire(rule, &steps, &sources, &mut out);
                fresh.entry(rule.predicate.clone()).or_default().extend(out);
            }
        }
        delta = absorb(fresh, derived);
    }
}

/// Inserts new tuples into the derived relations; returns those that were
/// not already present, grouped by predicate.
fn absorb(
    fresh: BTreeMap<String, Vec<Tuple>>,
    derived: &mut HashMap<String, Relation>,
) -> HashMap<String, Relation> {
    let mut delta: HashMap<String, Relation> = HashMap::new();
    for (pred, tuples) in fresh {
        let rel = derived.get_mut(&pred).expect("head relation exists");
        let d = delta.entry(pred).or_default();
        for t in tuples {
            if rel.insert(t.clone()) {
                d.insert(t);
            }
        }
    }
    delta
}
