//! Seeded graph generators and oracles that do not use the library's
//! reachability tables or query evaluator.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use traceflow::document::AnnotationDocument;
use traceflow::label::{EdgeLabel, NodeLabel};

pub const GENERATED_NO_CONCLUSION: [&str; 7] = [
    "planning",
    "fact",
    "reasoning",
    "restatement",
    "assumption",
    "example",
    "reflection",
];

/// A random left-to-right DAG: `contexts` context nodes first, then trace
/// nodes. Each forward pair (i, j) gets an edge with probability `density`;
/// edges never end at a context node. When `conclusion` is set, that range
/// of ordinals is labeled conclusion.
pub struct RandomDag {
    pub doc: AnnotationDocument,
    pub edges: Vec<(usize, usize)>,
    pub n: usize,
}

pub fn random_dag(
    rng: &mut StdRng,
    n: usize,
    contexts: usize,
    density: f64,
    conclusion: Option<std::ops::Range<usize>>,
) -> RandomDag {
    let mut doc = AnnotationDocument::default();
    for i in 0..n {
        let label = if i < contexts {
            "context"
        } else if conclusion.as_ref().is_some_and(|r| r.contains(&i)) {
            "conclusion"
        } else {
            GENERATED_NO_CONCLUSION.choose(rng).unwrap()
        };
        doc.node(&format!("n{i}"), label, &format!("text {i}"));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1).max(contexts)..n {
            if rng.gen_bool(density) {
                let label = EdgeLabel::ALL.choose(rng).unwrap().as_str();
                doc.edge(&format!("n{i}"), &format!("n{j}"), label);
                edges.push((i, j));
            }
        }
    }
    RandomDag { doc, edges, n }
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if !adj[a].contains(&b) {
            adj[a].push(b);
        }
    }
    adj
}

/// reach[x][y]: a path of one or more edges leads from x to y (depth-first).
pub fn dfs_reach(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let adj = adjacency(n, edges);
    let mut reach = vec![vec![false; n]; n];
    for (start, row) in reach.iter_mut().enumerate() {
        let mut stack: Vec<usize> = adj[start].clone();
        while let Some(v) = stack.pop() {
            if !row[v] {
                row[v] = true;
                stack.extend(&adj[v]);
            }
        }
    }
    reach
}

/// All-pairs shortest path lengths in edges (Floyd–Warshall).
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = d[a][b].min(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| (v < INF).then_some(v as u32))
                .collect()
        })
        .collect()
}

/// Nodes with a path into any seed, seeds excluded (breadth-first over
/// reversed edges).
pub fn reverse_bfs(n: usize, edges: &[(usize, usize)], seeds: &[usize]) -> BTreeSet<usize> {
    let mut radj = vec![Vec::new(); n];
    for &(a, b) in edges {
        radj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
    let mut out = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        for &p in &radj[v] {
            if !seen[p] {
                seen[p] = true;
                out.insert(p);
                queue.push_back(p);
            }
        }
    }
    for s in seeds {
        out.remove(s);
    }
    out
}

// ---------------------------------------------------------------------------
// Exhaustive-assignment query oracle.

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OVal {
    Int(i64),
    Str(String),
}

impl OVal {
    pub fn render(&self) -> String {
        match self {
            OVal::Int(i) => i.to_string(),
            OVal::Str(s) => s.clone(),
        }
    }

    fn literal(&self) -> String {
        match self {
            OVal::Int(i) => i.to_string(),
            OVal::Str(s) => format!("\"{s}\""),
        }
    }
}

#[derive(Debug, Clone)]
pub enum OTerm {
    Var(usize),
    Const(OVal),
}

#[derive(Debug, Clone)]
pub struct OAtom {
    pub pred: &'static str,
    pub args: Vec<OTerm>,
}

#[derive(Debug, Clone, Copy)]
pub enum OCmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl OCmp {
    fn text(self) -> &'static str {
        match self {
            OCmp::Eq => "==",
            OCmp::Ne => "!=",
            OCmp::Lt => "<",
            OCmp::Le => "<=",
            OCmp::Gt => ">",
            OCmp::Ge => ">=",
        }
    }

    fn holds(self, a: &OVal, b: &OVal) -> bool {
        let ord = match (a, b) {
            (OVal::Int(x), OVal::Int(y)) => x.cmp(y),
            (OVal::Str(x), OVal::Str(y)) => x.cmp(y),
            _ => return false,
        };
        match self {
            OCmp::Eq => ord.is_eq(),
            OCmp::Ne => ord.is_ne(),
            OCmp::Lt => ord.is_lt(),
            OCmp::Le => ord.is_le(),
            OCmp::Gt => ord.is_gt(),
            OCmp::Ge => ord.is_ge(),
        }
    }
}

/// A single conjunctive rule: head variables, positive atoms, one comparison.
#[derive(Debug, Clone)]
pub struct OQuery {
    pub head: Vec<usize>,
    pub atoms: Vec<OAtom>,
    pub cmp: Option<(OTerm, OCmp, OTerm)>,
}

const VAR_NAMES: [&str; 3] = ["X", "Y", "Z"];

fn term_text(t: &OTerm) -> String {
    match t {
        OTerm::Var(v) => VAR_NAMES[*v].to_string(),
        OTerm::Const(c) => c.literal(),
    }
}

impl OQuery {
    pub fn to_source(&self) -> String {
        let head: Vec<&str> = self.head.iter().map(|&v| VAR_NAMES[v]).collect();
        let mut body: Vec<String> = self
            .atoms
            .iter()
            .map(|a| {
                let args: Vec<String> = a.args.iter().map(term_text).collect();
                format!("{}({})", a.pred, args.join(", "))
            })
            .collect();
        if let Some((l, op, r)) = &self.cmp {
            body.push(format!("{} {} {}", term_text(l), op.text(), term_text(r)));
        }
        format!("q({}) :- {}.", head.join(", "), body.join(", "))
    }
}

/// Base facts of a document computed with the oracles above.
pub struct OracleFacts {
    pub facts: HashSet<(&'static str, Vec<OVal>)>,
    pub ids: Vec<String>,
    pub node_labels: Vec<String>,
    pub edge_labels: Vec<(usize, usize, String)>,
}

impl OracleFacts {
    pub fn new(doc: &AnnotationDocument) -> Self {
        let n = doc.nodes.len();
        let index: HashMap<&str, usize> = doc
            .nodes
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.as_str(), i))
            .collect();
        let ids: Vec<String> = doc.nodes.iter().map(|r| r.id.clone()).collect();
        let edge_labels: Vec<(usize, usize, String)> = doc
            .edges
            .iter()
            .map(|e| {
                (
                    index[e.src.as_str()],
                    index[e.dst.as_str()],
                    e.label.clone(),
                )
            })
            .collect();
        let pairs: Vec<(usize, usize)> = edge_labels.iter().map(|(a, b, _)| (*a, *b)).collect();
        let reach = dfs_reach(n, &pairs);
        let dist = floyd_warshall(n, &pairs);
        let s = |i: usize| OVal::Str(ids[i].clone());

        let mut facts = HashSet::new();
        for (i, rec) in doc.nodes.iter().enumerate() {
            facts.insert(("node", vec![s(i), OVal::Str(rec.label.clone())]));
            facts.insert(("order", vec![s(i), OVal::Int(i as i64)]));
        }
        for (a, b, l) in &edge_labels {
            facts.insert(("edge", vec![s(*a), s(*b), OVal::Str(l.clone())]));
        }
        for x in 0..n {
            for y in 0..n {
                if reach[x][y] {
                    facts.insert(("connected", vec![s(x), s(y)]));
                }
                if let Some(d) = dist[x][y] {
                    facts.insert(("distance", vec![s(x), s(y), OVal::Int(d as i64)]));
                }
            }
        }
        OracleFacts {
            facts,
            ids,
            node_labels: doc.nodes.iter().map(|r| r.label.clone()).collect(),
            edge_labels,
        }
    }

    /// Every constant that can appear in a fact.
    pub fn universe(&self) -> Vec<OVal> {
        let mut u: BTreeSet<OVal> = BTreeSet::new();
        for (_, args) in &self.facts {
            u.extend(args.iter().cloned());
        }
        u.into_iter().collect()
    }

    /// Tries every assignment of every variable over the whole universe.
    pub fn evaluate(&self, q: &OQuery, vars: usize) -> BTreeSet<Vec<String>> {
        let universe = self.universe();
        let mut out = BTreeSet::new();
        if universe.is_empty() {
            return out;
        }
        // Intern values so the inner loop compares integers.
        let code: HashMap<&OVal, u32> = universe.iter().zip(0u32..).collect();
        let facts: HashSet<(&str, Vec<u32>)> = self
            .facts
            .iter()
            .map(|(p, args)| (*p, args.iter().map(|a| code[a]).collect()))
            .collect();
        // Constants missing from the universe can never match a fact.
        let missing = u32::MAX;
        let intern = |t: &OTerm| match t {
            OTerm::Var(v) => Err(*v),
            OTerm::Const(c) => Ok(code.get(c).copied().unwrap_or(missing)),
        };
        let atoms: Vec<(&str, Vec<Result<u32, usize>>)> = q
            .atoms
            .iter()
            .map(|a| (a.pred, a.args.iter().map(intern).collect()))
            .collect();

        let mut assignment: Vec<usize> = vec![0; vars];
        let mut tuple = Vec::with_capacity(3);
        loop {
            let atoms_hold = atoms.iter().all(|(pred, args)| {
                tuple.clear();
                tuple.extend(args.iter().map(|a| match a {
                    Ok(c) => *c,
                    Err(v) => assignment[*v] as u32,
                }));
                facts.contains(&(*pred, tuple.clone()))
            });
            if atoms_hold {
                let value = |t: &OTerm| match t {
                    OTerm::Var(v) => universe[assignment[*v]].clone(),
                    OTerm::Const(c) => c.clone(),
                };
                let cmp_holds = q
                    .cmp
                    .as_ref()
                    .is_none_or(|(l, op, r)| op.holds(&value(l), &value(r)));
                if cmp_holds {
                    out.insert(
                        q.head
                            .iter()
                            .map(|&v| universe[assignment[v]].render())
                            .collect(),
                    );
                }
            }
            // Next assignment in mixed-radix order.
            let mut k = 0;
            loop {
                if k == vars {
                    return out;
                }
                assignment[k] += 1;
                if assignment[k] < universe.len() {
                    break;
                }
                assignment[k] = 0;
                k += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Id,
    Int,
    Label,
}

/// A random safe conjunctive query with up to three variables, 1-4 body
/// atoms and one comparison. Each variable gets a sort and is only placed in
/// argument positions of that sort, so most joins are satisfiable. Label
/// constants are usually drawn from labels present in `facts`. Returns the
/// query and its variable count.
pub fn random_query(rng: &mut StdRng, facts: &OracleFacts) -> (OQuery, usize) {
    let n_nodes = facts.ids.len();
    let sorts: Vec<Sort> = (0..rng.gen_range(1..=3))
        .map(|i| match (i, rng.gen_range(0..6)) {
            (0, _) | (_, 0..=3) => Sort::Id,
            (_, 4) => Sort::Int,
            _ => Sort::Label,
        })
        .collect();
    let node_label = |rng: &mut StdRng| {
        let label = match facts.node_labels.choose(rng) {
            Some(l) if rng.gen_bool(0.8) => l.clone(),
            _ => NodeLabel::ALL.choose(rng).unwrap().as_str().to_string(),
        };
        OTerm::Const(OVal::Str(label))
    };
    let edge_label = |rng: &mut StdRng| {
        let label = match facts.edge_labels.choose(rng) {
            Some((_, _, l)) if rng.gen_bool(0.8) => l.clone(),
            _ => EdgeLabel::ALL.choose(rng).unwrap().as_str().to_string(),
        };
        OTerm::Const(OVal::Str(label))
    };
    let small_int =
        |rng: &mut StdRng, hi: usize| OTerm::Const(OVal::Int(rng.gen_range(0..=hi as i64)));
    let node_id = |rng: &mut StdRng| {
        OTerm::Const(OVal::Str(format!("n{}", rng.gen_range(0..n_nodes.max(1)))))
    };
    // A variable of the wanted sort, or `fallback` when there is none.
    let pick = |rng: &mut StdRng, sort: Sort, fallback: &dyn Fn(&mut StdRng) -> OTerm| {
        let candidates: Vec<usize> = (0..sorts.len()).filter(|&v| sorts[v] == sort).collect();
        match candidates.choose(rng) {
            Some(&v) if rng.gen_bool(0.95) => OTerm::Var(v),
            _ => fallback(rng),
        }
    };
    let id = |rng: &mut StdRng| pick(rng, Sort::Id, &node_id);
    // Two id arguments, usually distinct: a repeated variable only matches
    // distance(X, X, 0) in an acyclic graph.
    let id_pair = |rng: &mut StdRng| {
        let first = id(rng);
        let mut second = id(rng);
        let repeated =
            |a: &OTerm, b: &OTerm| matches!((a, b), (OTerm::Var(x), OTerm::Var(y)) if x == y);
        if repeated(&first, &second) && !rng.gen_bool(0.1) {
            second = id(rng);
            if repeated(&first, &second) {
                second = node_id(rng);
            }
        }
        [first, second]
    };

    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let atom = match rng.gen_range(0..5) {
            0 => OAtom {
                pred: "node",
                args: vec![id(rng), pick(rng, Sort::Label, &node_label)],
            },
            1 => OAtom {
                pred: "edge",
                args: [
                    id_pair(rng).to_vec(),
                    vec![pick(rng, Sort::Label, &edge_label)],
                ]
                .concat(),
            },
            2 => OAtom {
                pred: "connected",
                args: id_pair(rng).to_vec(),
            },
            3 => OAtom {
                pred: "distance",
                args: [
                    id_pair(rng).to_vec(),
                    vec![pick(rng, Sort::Int, &|r| small_int(r, 3))],
                ]
                .concat(),
            },
            _ => OAtom {
                pred: "order",
                args: vec![id(rng), pick(rng, Sort::Int, &|r| small_int(r, n_nodes))],
            },
        };
        atoms.push(atom);
    }

    // Keep only variables bound by some atom; renumber them densely.
    let mut used: Vec<usize> = atoms
        .iter()
        .flat_map(|a| a.args.iter())
        .filter_map(|t| match t {
            OTerm::Var(v) => Some(*v),
            _ => None,
        })
        .collect();
    used.sort_unstable();
    used.dedup();
    if used.is_empty() {
        // Ground body: bind a variable so the head is not empty.
        atoms.push(OAtom {
            pred: "node",
            args: vec![OTerm::Var(0), node_label(rng)],
        });
        used.push(0);
    }
    let remap = |t: &OTerm| match t {
        OTerm::Var(v) => OTerm::Var(used.iter().position(|u| u == v).unwrap()),
        c => c.clone(),
    };
    let atoms: Vec<OAtom> = atoms
        .iter()
        .map(|a| OAtom {
            pred: a.pred,
            args: a.args.iter().map(remap).collect(),
        })
        .collect();
    let sorts: Vec<Sort> = used
        .iter()
        .map(|&v| if v < sorts.len() { sorts[v] } else { Sort::Id })
        .collect();
    let vars = used.len();

    let ops = [OCmp::Eq, OCmp::Ne, OCmp::Lt, OCmp::Le, OCmp::Gt, OCmp::Ge];
    let op = *ops.choose(rng).unwrap();
    let lhs = rng.gen_range(0..vars);
    let same_sort: Vec<usize> = (0..vars).filter(|&v| sorts[v] == sorts[lhs]).collect();
    let rhs = if rng.gen_bool(0.4) {
        OTerm::Var(*same_sort.choose(rng).unwrap())
    } else if rng.gen_bool(0.1) {
        // Occasionally compare across sorts; such comparisons never hold.
        small_int(rng, n_nodes)
    } else {
        match sorts[lhs] {
            Sort::Id => node_id(rng),
            Sort::Int => small_int(rng, n_nodes),
            Sort::Label => node_label(rng),
        }
    };
    (
        OQuery {
            head: (0..vars).collect(),
            atoms,
            cmp: Some((OTerm::Var(lhs), op, rhs)),
        },
        vars,
    )
}
