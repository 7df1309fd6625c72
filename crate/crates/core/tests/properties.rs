mod common;

use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;

use common::{OracleFacts, GENERATED_NO_CONCLUSION};
use traceflow::document::{parse_document, AnnotationDocument};
use traceflow::export::export_facts;
use traceflow::patterns::{builtin_pattern, builtin_patterns, detect};
use traceflow::query::{
    evaluate, evaluate_on, ground_facts, parse_query, read_facts, BaseFacts, QueryProgram,
    Strategy as EvalStrategy,
};
use traceflow::stats::corpus_stats;
use traceflow::{build_graph, EdgeLabel, FlowGraph, NodeLabel, Strictness};

/// Raw material for a valid left-to-right document.
#[derive(Debug, Clone)]
struct Shape {
    n: usize,
    contexts: usize,
    labels: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
    conclusion: Option<(usize, usize)>,
}

impl Shape {
    fn document(&self) -> AnnotationDocument {
        let mut doc = AnnotationDocument::default();
        let run = self.conclusion.map(|(start, len)| {
            let start = self.contexts + start % (self.n - self.contexts).max(1);
            start..(start + len).min(self.n)
        });
        for i in 0..self.n {
            let label = if i < self.contexts {
                "context"
            } else if run.as_ref().is_some_and(|r| r.contains(&i)) {
                "conclusion"
            } else {
                GENERATED_NO_CONCLUSION[self.labels[i] % GENERATED_NO_CONCLUSION.len()]
            };
            doc.node(&format!("n{i}"), label, &format!("step {i}"));
        }
        for &(a, b, l) in &self.edges {
            let (a, b) = (a % self.n, b % self.n);
            let (src, dst) = (a.min(b), a.max(b));
            if src != dst && dst >= self.contexts {
                doc.edge(
                    &format!("n{src}"),
                    &format!("n{dst}"),
                    EdgeLabel::ALL[l % 14].as_str(),
                );
            }
        }
        doc
    }

    fn graph(&self) -> FlowGraph {
        build_graph(&self.document(), Strictness::Lenient).expect("shape builds a valid graph")
    }
}

fn shape() -> impl Strategy<Value = Shape> {
    (1usize..12, 0usize..3).prop_flat_map(|(n, contexts)| {
        let contexts = contexts.min(n - 1);
        (
            vec(0usize..7, n),
            vec((0..n, 0..n, 0usize..14), 0..(n * 3)),
            proptest::option::of((0usize..12, 1usize..4)),
        )
            .prop_map(move |(labels, edges, conclusion)| Shape {
                n,
                contexts,
                labels,
                edges,
                conclusion,
            })
    })
}

fn concluded_shape() -> impl Strategy<Value = Shape> {
    (shape(), 0usize..12, 1usize..4).prop_map(|(mut s, start, len)| {
        s.conclusion = Some((start, len));
        s
    })
}

fn id(i: usize) -> String {
    format!("n{i}")
}

fn rows(program: &QueryProgram, graph: &FlowGraph, predicate: &str) -> BTreeSet<Vec<String>> {
    evaluate(program, graph)
        .into_iter()
        .find(|m| m.predicate == predicate)
        .map(|m| m.rows().into_iter().collect())
        .unwrap_or_default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn connected_iff_positive_distance(s in shape()) {
        let g = s.graph();
        for x in 0..s.n {
            for y in 0..s.n {
                let d = g.distance(&id(x), &id(y)).unwrap();
                prop_assert_eq!(g.connected(&id(x), &id(y)).unwrap(), d.is_some_and(|d| d >= 1));
                if x == y {
                    prop_assert_eq!(d, Some(0));
                }
            }
        }
    }

    #[test]
    fn distances_satisfy_triangle_inequality(s in shape()) {
        let g = s.graph();
        for x in 0..s.n {
            for y in 0..s.n {
                for z in 0..s.n {
                    if let (Some(a), Some(b)) = (g.distance_between(x, y), g.distance_between(y, z)) {
                        let c = g.distance_between(x, z);
                        prop_assert!(c.is_some_and(|c| c <= a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn ancestors_are_exactly_the_connected_sources(s in shape()) {
        let g = s.graph();
        for y in 0..s.n {
            let target = id(y);
            let got: Vec<&str> = g.ancestors(&[target.as_str()]).unwrap();
            let want: Vec<String> = (0..s.n)
                .filter(|&x| g.connected(&id(x), &target).unwrap())
                .map(id)
                .collect();
            prop_assert_eq!(got, want.iter().map(String::as_str).collect::<Vec<_>>());
        }
    }

    #[test]
    fn compression_is_ancestor_closed_and_idempotent(s in concluded_shape()) {
        let g = s.graph();
        let c = g.compress_to_conclusion().unwrap();
        let kept: BTreeSet<&str> = c.graph.nodes().iter().map(|n| n.id.as_str()).collect();
        // Every predecessor of a kept node is kept.
        for node in c.graph.nodes() {
            for p in g.direct_predecessors(&node.id).unwrap() {
                prop_assert!(kept.contains(p), "{} lost predecessor {}", node.id, p);
            }
        }
        // Minimality: every kept generated node reaches the conclusion run or is in it.
        let run = g.conclusion_run().unwrap();
        for node in c.graph.nodes().iter().filter(|n| n.label.is_generated()) {
            let ord = g.ordinal_of(&node.id).unwrap();
            prop_assert!(run.contains(&ord) || run.clone().any(|r| g.distance_between(ord, r).is_some()));
        }
        prop_assert!(c.kept >= 1 && c.kept <= c.total);
        let again = c.graph.compress_to_conclusion().unwrap();
        prop_assert_eq!(again.graph.to_document(), c.graph.to_document());
        prop_assert_eq!(again.kept, again.total);
    }

    #[test]
    fn body_order_does_not_change_results(s in shape(), rot in 0usize..4) {
        let g = s.graph();
        let mut body = [
            "node(X, \"reasoning\")",
            "connected(X, Y)",
            "distance(X, Y, D)",
            "order(Y, I)",
            "D <= 2",
        ];
        let base = parse_query(&format!("q(X, Y, D, I) :- {}.", body.join(", "))).unwrap();
        body.rotate_left(rot);
        body.swap(0, rot);
        let shuffled = parse_query(&format!("q(X, Y, D, I) :- {}.", body.join(", "))).unwrap();
        prop_assert_eq!(rows(&base, &g, "q"), rows(&shuffled, &g, "q"));
    }

    #[test]
    fn recursion_agrees_with_connected_and_naive(s in shape()) {
        let g = s.graph();
        let program = parse_query(
            "reach(X, Y) :- edge(X, Y, L).\n\
             reach(X, Z) :- reach(X, Y), edge(Y, Z, L).\n\
             both(X, Y) :- reach(X, Y), connected(X, Y).\n\
             odd(X, Y) :- edge(X, Y, L).\n\
             odd(X, Z) :- even(X, Y), edge(Y, Z, L).\n\
             even(X, Z) :- odd(X, Y), edge(Y, Z, L).",
        )
        .unwrap();
        let mut semi = ground_facts(&g);
        let mut naive = ground_facts(&g);
        let a = evaluate_on(&program, &mut semi, EvalStrategy::SemiNaive);
        let b = evaluate_on(&program, &mut naive, EvalStrategy::Naive);
        prop_assert_eq!(&a, &b);
        let reach: BTreeSet<Vec<String>> =
            a.iter().find(|m| m.predicate == "reach").unwrap().rows().into_iter().collect();
        let connected: BTreeSet<Vec<String>> = (0..s.n)
            .flat_map(|x| (0..s.n).map(move |y| (x, y)))
            .filter(|&(x, y)| g.connected(&id(x), &id(y)).unwrap())
            .map(|(x, y)| vec![id(x), id(y)])
            .collect();
        prop_assert_eq!(&reach, &connected);
        let both: BTreeSet<Vec<String>> =
            a.iter().find(|m| m.predicate == "both").unwrap().rows().into_iter().collect();
        prop_assert_eq!(both, connected);
    }

    #[test]
    fn positive_queries_are_monotone(s in shape(), extra in vec((0usize..12, 0usize..12, 0usize..14), 1..6)) {
        let small = s.graph();
        let mut bigger = s.clone();
        bigger.edges.extend(extra);
        let big = bigger.graph();
        for pattern in builtin_patterns() {
            let before: BTreeSet<Vec<String>> = detect(&pattern, &small).matches.rows().into_iter().collect();
            let after: BTreeSet<Vec<String>> = detect(&pattern, &big).matches.rows().into_iter().collect();
            prop_assert!(before.is_subset(&after), "{} lost matches", pattern.name);
        }
    }

    #[test]
    fn patterns_are_invariant_under_renaming(s in shape()) {
        let g = s.graph();
        let mut renamed = s.document();
        let rename = |old: &str| format!("step_{}", &old[1..]);
        for node in &mut renamed.nodes {
            node.id = rename(&node.id);
        }
        for edge in &mut renamed.edges {
            edge.src = rename(&edge.src);
            edge.dst = rename(&edge.dst);
        }
        let h = build_graph(&renamed, Strictness::Lenient).unwrap();
        for pattern in builtin_patterns() {
            let mapped: BTreeSet<Vec<String>> = detect(&pattern, &g)
                .matches
                .rows()
                .into_iter()
                .map(|row| row.iter().map(|v| rename(v)).collect())
                .collect();
            let direct: BTreeSet<Vec<String>> = detect(&pattern, &h).matches.rows().into_iter().collect();
            prop_assert_eq!(mapped, direct, "{}", pattern.name);
        }
    }

    #[test]
    fn verification_matches_meet_all_conditions(s in shape()) {
        let g = s.graph();
        let doc = s.document();
        let oracle = OracleFacts::new(&doc);
        let has_edge = |a: &str, b: &str, l: &str| {
            doc.edges.iter().any(|e| e.src == a && e.dst == b && e.label == l)
        };
        let found = detect(&builtin_pattern("verification").unwrap(), &g);
        for row in found.matches.rows() {
            let (x, y, z) = (&row[0], &row[1], &row[2]);
            prop_assert_eq!(g.node_by_id(y).unwrap().label, NodeLabel::Planning);
            prop_assert!(has_edge(x, y, "frontier-verify"));
            prop_assert!(g.connected(y, z).unwrap());
            prop_assert!(has_edge(x, z, "support") || has_edge(x, z, "refute"));
        }
        // And nothing is missed: brute force over all triples.
        let mut expected = BTreeSet::new();
        for x in &oracle.ids {
            for y in &oracle.ids {
                for z in &oracle.ids {
                    if g.node_by_id(y).unwrap().label == NodeLabel::Planning
                        && has_edge(x, y, "frontier-verify")
                        && g.connected(y, z).unwrap()
                        && (has_edge(x, z, "support") || has_edge(x, z, "refute"))
                    {
                        expected.insert(vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
        }
        prop_assert_eq!(found.matches.rows().into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn stats_ignore_corpus_order_and_sum_up(shapes in vec(shape(), 1..5)) {
        let graphs: Vec<FlowGraph> = shapes.iter().map(Shape::graph).collect();
        let forward = corpus_stats(&graphs).unwrap();
        let mut reversed = graphs.clone();
        reversed.reverse();
        prop_assert_eq!(&corpus_stats(&reversed).unwrap(), &forward);

        let sum = |ls: &[traceflow::stats::LabelCount]| ls.iter().map(|l| l.count).sum::<u64>();
        prop_assert_eq!(sum(&forward.node_labels), forward.nodes);
        prop_assert_eq!(sum(&forward.edge_labels), forward.edges);
        prop_assert_eq!(sum(&forward.categories), forward.edges);
        let generated: usize = graphs
            .iter()
            .map(|g| g.nodes().iter().filter(|n| n.label.is_generated()).count())
            .sum();
        prop_assert_eq!(forward.nodes, generated as u64);
    }

    #[test]
    fn documents_round_trip_through_json(s in shape(), text in "\\PC{0,40}", key in "[a-z]{1,8}", value in "\\PC{0,20}") {
        let mut doc = s.document();
        if let Some(first) = doc.nodes.first_mut() {
            first.text = text;
        }
        doc.meta.insert(key, value);
        let again = parse_document(&doc.to_json()).unwrap();
        prop_assert_eq!(&again, &doc);
        let g = build_graph(&doc, Strictness::Lenient).unwrap();
        let facts = export_facts(&g).unwrap();
        prop_assert_eq!(read_facts(&facts).unwrap(), BaseFacts::from_graph(&g));
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,80}") {
        let _ = parse_query(&text);
        let _ = read_facts(&text);
        let _ = parse_document(&text);
    }

    #[test]
    fn query_like_noise_never_panics(
        tokens in vec(prop::sample::select(vec![
            "q", "(", ")", "X", "Y", ",", ".", ":-", "node", "edge", "not", "\"fact\"", "3", "-1", "<", "==", "%c\n",
        ]), 0..24)
    ) {
        let _ = parse_query(&tokens.join(" "));
    }
}

#[test]
fn strict_graphs_stay_valid_when_round_tripped() {
    for name in ["chain", "diamond", "verification", "patterns"] {
        let path = format!(
            "{}/tests/fixtures/{name}.rfg.json",
            env!("CARGO_MANIFEST_DIR")
        );
        let doc = traceflow::load_document(&std::fs::read(path).unwrap()).unwrap();
        let g = build_graph(&doc, Strictness::Strict).unwrap();
        let again = build_graph(&g.to_document(), Strictness::Strict).unwrap();
        assert_eq!(again.to_document(), g.to_document(), "{name}");
    }
}

#[test]
fn parsed_programs_print_back_to_themselves() {
    for pattern in builtin_patterns() {
        let printed = pattern.program.to_string();
        let reparsed = parse_query(&printed).unwrap();
        assert_eq!(reparsed.to_string(), printed, "{}", pattern.name);
    }
}
