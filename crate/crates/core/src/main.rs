use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use traceflow::document::load_document;
use traceflow::export::{export_dot, export_facts, DotOptions};
use traceflow::graph::{build_graph, ContextMode, FlowGraph};
use traceflow::patterns::{builtin_pattern, builtin_pattern_names, builtin_patterns, detect};
use traceflow::query::{evaluate, parse_query, MatchSet};
use traceflow::stats::{corpus_stats, fixed, report, ReportFormat};
use traceflow::validate::Strictness;

/// Validate, query and summarize annotated reasoning-trace graphs.
#[derive(Debug, Parser)]
#[command(name = "traceflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check annotation files against the schema.
    Validate {
        /// Treat endpoint-compatibility findings as errors.
        #[arg(long)]
        strict: bool,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Evaluate a query program against a graph.
    Query {
        graph: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Table)]
        out: OutFormat,
    },
    /// Detect built-in reasoning patterns.
    Detect {
        graph: PathBuf,
        #[command(flatten)]
        which: PatternChoice,
    },
    /// Corpus label statistics.
    Stats {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Keep only the conclusion and its ancestors (plus context).
    Compress {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a graph as facts or Graphviz DOT.
    Export {
        graph: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// DOT only: no fill or edge colors.
        #[arg(long)]
        no_color: bool,
    },
    /// List the nodes needed to judge one node.
    Context {
        graph: PathBuf,
        node: String,
        /// All ancestors instead of direct predecessors.
        #[arg(long)]
        closure: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PatternChoice {
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Facts,
}

/// Exit status: 1 for invalid input data, 2 for usage, I/O and parse errors.
#[derive(Debug)]
enum Failure {
    Input(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Usage(m) => m,
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> CmdResult {
    match command {
        Command::Validate { strict, paths } => cmd_validate(&paths, strict, out),
        Command::Query {
            graph,
            rules,
            out: format,
        } => cmd_query(&graph, &rules, format, out),
        Command::Detect { graph, which } => cmd_detect(&graph, which, out),
        Command::Stats { paths, csv } => cmd_stats(&paths, csv, out),
        Command::Compress { graph, out: target } => cmd_compress(&graph, &target, out),
        Command::Export {
            graph,
            format,
            no_color,
        } => cmd_export(&graph, format, no_color, out),
        Command::Context {
            graph,
            node,
            closure,
        } => cmd_context(&graph, &node, closure, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<FlowGraph, Failure> {
    let doc = load_document(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    build_graph(&doc, Strictness::Lenient).map_err(|report| {
        Failure::Input(format!(
            "{}: invalid graph ({})\n{}",
            path.display(),
            count(report.error_count(), "error"),
            report.to_string().trim_end()
        ))
    })
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Usage(format!("write failed: {e}"))
}

/// "1 match", "2 matches", "0 errors".
fn count(n: usize, noun: &str) -> String {
    match (n, noun) {
        (1, _) => format!("1 {noun}"),
        (_, "match") => format!("{n} matches"),
        _ => format!("{n} {noun}s"),
    }
}

fn cmd_validate(paths: &[PathBuf], strict: bool, out: &mut impl Write) -> CmdResult {
    let strictness = if strict {
        Strictness::Strict
    } else {
        Strictness::Lenient
    };
    let mut code = 0;
    for path in paths {
        let doc = match read(path).and_then(|bytes| {
            load_document(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }) {
            Ok(doc) => doc,
            Err(failure) => {
                eprintln!("error: {}", failure.message());
                code = 2;
                continue;
            }
        };
        let report = match build_graph(&doc, strictness) {
            Ok(graph) => graph.warnings().clone(),
            Err(report) => {
                code = code.max(1);
                report
            }
        };
        writeln!(
            out,
            "{}: {}, {}",
            path.display(),
            count(report.error_count(), "error"),
            count(report.warning_count(), "warning")
        )
        .map_err(io_failure)?;
        for violation in report.violations() {
            writeln!(out, "  {violation}").map_err(io_failure)?;
        }
    }
    Ok(code)
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn write_matches(sets: &[MatchSet], format: OutFormat, out: &mut impl Write) -> io::Result<()> {
    for set in sets {
        match format {
            OutFormat::Table => {
                writeln!(
                    out,
                    "{}/{}: {}",
                    set.predicate,
                    set.arity,
                    count(set.len(), "match")
                )?;
                for row in set.rows() {
                    writeln!(out, "{}", row.join(","))?;
                }
            }
            OutFormat::Csv => {
                for row in set.rows() {
                    let fields: Vec<String> = std::iter::once(set.predicate.clone())
                        .chain(row)
                        .map(|f| csv_field(&f))
                        .collect();
                    writeln!(out, "{}", fields.join(","))?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_query(graph: &Path, rules: &Path, format: OutFormat, out: &mut impl Write) -> CmdResult {
    let graph = load_graph(graph)?;
    let text = String::from_utf8(read(rules)?)
        .map_err(|_| Failure::Usage(format!("{}: not valid UTF-8", rules.display())))?;
    let program =
        parse_query(&text).map_err(|e| Failure::Usage(format!("{}: {e}", rules.display())))?;
    write_matches(&evaluate(&program, &graph), format, out).map_err(io_failure)?;
    Ok(0)
}

fn cmd_detect(graph: &Path, which: PatternChoice, out: &mut impl Write) -> CmdResult {
    let patterns = match which.pattern {
        Some(name) => vec![builtin_pattern(&name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown pattern `{name}`; available: {}",
                builtin_pattern_names().join(", ")
            ))
        })?],
        None => builtin_patterns(),
    };
    let graph = load_graph(graph)?;
    for pattern in &patterns {
        let found = detect(pattern, &graph);
        writeln!(
            out,
            "{}: {}",
            found.pattern,
            count(found.matches.len(), "match")
        )
        .map_err(io_failure)?;
        for row in found.annotated() {
            let cells: Vec<String> = row
                .iter()
                .map(|(role, id)| format!("{role}={id}"))
                .collect();
            writeln!(out, "  {}", cells.join(", ")).map_err(io_failure)?;
        }
    }
    Ok(0)
}

fn cmd_stats(paths: &[PathBuf], csv: bool, out: &mut impl Write) -> CmdResult {
    let mut graphs = Vec::new();
    for path in paths {
        match load_graph(path) {
            Ok(graph) => graphs.push(graph),
            Err(failure) => eprintln!("warning: skipping {}", failure.message()),
        }
    }
    if graphs.is_empty() {
        return Err(Failure::Input("no valid graphs".to_string()));
    }
    let stats = corpus_stats(&graphs).expect("corpus is non-empty");
    let format = if csv {
        ReportFormat::Csv
    } else {
        ReportFormat::Table
    };
    out.write_all(report(&stats, format).as_bytes())
        .map_err(io_failure)?;
    Ok(0)
}

fn cmd_compress(graph: &Path, target: &Path, out: &mut impl Write) -> CmdResult {
    let graph = load_graph(graph)?;
    let compressed = graph
        .compress_to_conclusion()
        .map_err(|e| Failure::Input(e.to_string()))?;
    fs::write(target, compressed.graph.to_document().to_json())
        .map_err(|e| Failure::Usage(format!("{}: {e}", target.display())))?;
    writeln!(
        out,
        "ratio: {} ({} of {} generated nodes kept)",
        fixed(compressed.kept as u64, compressed.total as u64, 3),
        compressed.kept,
        compressed.total
    )
    .map_err(io_failure)?;
    Ok(0)
}

fn cmd_export(
    graph: &Path,
    format: ExportFormat,
    no_color: bool,
    out: &mut impl Write,
) -> CmdResult {
    let graph = load_graph(graph)?;
    let text = match format {
        ExportFormat::Facts => export_facts(&graph).map_err(|e| Failure::Input(e.to_string()))?,
        ExportFormat::Dot => export_dot(
            &graph,
            DotOptions {
                color_by_label: !no_color,
            },
        ),
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(0)
}

fn cmd_context(graph: &Path, node: &str, closure: bool, out: &mut impl Write) -> CmdResult {
    let graph = load_graph(graph)?;
    let mode = if closure {
        ContextMode::Closure
    } else {
        ContextMode::Direct
    };
    let nodes = graph
        .evaluation_context(node, mode)
        .map_err(|e| Failure::Input(e.to_string()))?;
    for n in nodes {
        let text = n
            .text
            .replace('\\', "\\\\")
            .replace('\n', "\\n")
            .replace('\t', "\\t");
        writeln!(out, "{}\t{}\t{}", n.id, n.label, text).map_err(io_failure)?;
    }
    Ok(0)
}
