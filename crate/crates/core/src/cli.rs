//! The `atc` command line: `index`, `decompose`, `query`, `gen` and `eval`.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or format error, 3 no
//! community (only with `--fail-on-empty`).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::{Error, Infeasible};
use crate::eval::{
    evaluate, gen_queries, generate_graph, load_queries, load_truth, plant_attributes,
    write_dataset, GenConfig, PlantConfig,
};
use crate::graph::{load_attributes, load_edge_list, Graph, Subgraph, VertexId};
use crate::greedy::{Algorithm, SearchResult};
use crate::index::{self, build_index, AtIndex};
use crate::local::{classify_query, QueryClass};
use crate::query::{QuerySpec, DEFAULT_D, DEFAULT_ETA, DEFAULT_K};
use crate::score::{format_score, parse_decimal, Rational};
use crate::truss::truss_decompose;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (index format 1)");

#[derive(Debug, Parser)]
#[command(name = "atc", version = VERSION, about = "Attributed truss community search")]
pub struct Cli {
    /// Worker threads for index building and evaluation [env: ATC_THREADS]
    #[arg(long, global = true, env = "ATC_THREADS", hide_env = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an AT-index file
    Index(IndexArgs),
    /// Print the trussness of every edge
    Decompose(DecomposeArgs),
    /// Search a community around query nodes
    Query(QueryArgs),
    /// Generate a synthetic graph with planted communities and queries
    Gen(GenArgs),
    /// Score an algorithm against ground-truth communities
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Edge list, one `u v` pair per line
    #[arg(long)]
    pub graph: PathBuf,
    /// Attribute file, `vertex<TAB>label…` per line
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Output file (standard output if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Edge list (alternative to --index)
    #[arg(long, conflicts_with = "index", required_unless_present = "index")]
    pub graph: Option<PathBuf>,
    /// Attribute file for --graph
    #[arg(long, requires = "graph")]
    pub attr_file: Option<PathBuf>,
    /// AT-index file
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Comma-separated query vertex ids
    #[arg(long, value_delimiter = ',', required = true)]
    pub nodes: Vec<u64>,
    /// Comma-separated query attribute labels
    #[arg(long, value_delimiter = ',')]
    pub attrs: Vec<String>,
    /// basic, bulk, local or baseline
    #[arg(long, default_value = "local")]
    pub algo: Algorithm,
    #[arg(long, default_value_t = DEFAULT_K, conflicts_with = "auto_kd")]
    pub k: u32,
    #[arg(long, default_value_t = DEFAULT_D, conflicts_with = "auto_kd")]
    pub d: u32,
    /// Derive k and d from the candidate graph (local search only)
    #[arg(long)]
    pub auto_kd: bool,
    #[arg(long, default_value = "0.2", value_parser = decimal)]
    pub gamma: Rational,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: usize,
    #[arg(long, default_value = "0.03", value_parser = decimal)]
    pub epsilon: Rational,
    /// Check the query first and propose split queries when it is bad
    #[arg(long)]
    pub suggest_on_bad: bool,
    /// Exit with status 3 when no community is found
    #[arg(long)]
    pub fail_on_empty: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub communities: usize,
    /// Writes <prefix>.edges, .attrs, .truth and .queries
    #[arg(long)]
    pub out_prefix: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of queries to draw
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    /// Percentage of community members carrying its attributes
    #[arg(long, default_value_t = 80)]
    pub coverage: u32,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, conflicts_with = "index", required_unless_present = "index")]
    pub graph: Option<PathBuf>,
    /// Attribute file for --graph
    #[arg(long, requires = "graph")]
    pub attrs: Option<PathBuf>,
    /// AT-index file (graph and attributes are read from it)
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, default_value = "local")]
    pub algo: Algorithm,
    /// Report file (standard output if omitted)
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Add a runtime column (makes the report run-dependent)
    #[arg(long)]
    pub timing: bool,
}

fn decimal(s: &str) -> Result<Rational, String> {
    parse_decimal(s).ok_or_else(|| format!("not a non-negative decimal: {s:?}"))
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidQuery(_) | Error::Config(_) => EXIT_USAGE,
            Error::NoCommunity(_) => EXIT_EMPTY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let rendered = e.render().to_string();
                    // one line: the message plus any argument lines, no usage block
                    let line: Vec<&str> = rendered
                        .lines()
                        .take_while(|l| !l.starts_with("Usage:"))
                        .map(str::trim)
                        .filter(|l| {
                            !l.is_empty() && !l.starts_with("tip:") && !l.starts_with("For more")
                        })
                        .collect();
                    let _ = writeln!(err, "{}", line.join(" "));
                    EXIT_USAGE
                }
            };
        }
    };
    // output is buffered so that commands can run inside a worker pool
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(Failure {
            code: EXIT_USAGE,
            msg: "error: --threads must be at least 1".into(),
        }),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut buf)),
            Err(e) => Err(Failure {
                code: EXIT_USAGE,
                msg: e.to_string(),
            }),
        },
        None => dispatch(&cli.command, &mut buf),
    };
    let result = result.and_then(|code| emit(out, &buf).map(|_| code));
    match result {
        Ok(code) => code,
        Err(f) => {
            let msg = f.msg.lines().next().unwrap_or_default().to_owned();
            if msg.starts_with("error:") {
                let _ = writeln!(err, "{msg}");
            } else {
                let _ = writeln!(err, "error: {msg}");
            }
            f.code
        }
    }
}

fn dispatch(cmd: &Command, out: &mut Vec<u8>) -> Outcome {
    match cmd {
        Command::Index(a) => cmd_index(a, out),
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Query(a) => cmd_query(a, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Eval(a) => cmd_eval(a, out),
    }
}

fn emit(out: &mut dyn Write, bytes: impl AsRef<[u8]>) -> std::result::Result<(), Failure> {
    out.write_all(bytes.as_ref()).map_err(|e| Failure {
        code: EXIT_INPUT,
        msg: format!("writing output: {e}"),
    })
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e).into())
}

fn load_graph(graph: &Path, attrs: Option<&Path>) -> crate::Result<Graph> {
    let (g, _) = load_edge_list(graph)?;
    match attrs {
        Some(a) => load_attributes(a, g),
        None => Ok(g),
    }
}

fn load_input(
    graph: Option<&Path>,
    attrs: Option<&Path>,
    index: Option<&Path>,
) -> crate::Result<(Graph, Option<AtIndex>)> {
    match (graph, index) {
        (_, Some(path)) => {
            let (g, idx) = index::load(path)?;
            Ok((g, Some(idx)))
        }
        (Some(graph), None) => Ok((load_graph(graph, attrs)?, None)),
        (None, None) => Err(Error::Config(
            "either --graph or --index is required".into(),
        )),
    }
}

fn cmd_index(a: &IndexArgs, out: &mut Vec<u8>) -> Outcome {
    let g = load_graph(&a.graph, a.attrs.as_deref())?;
    let idx = build_index(&g);
    index::save(&g, &idx, &a.out)?;
    emit(
        out,
        format!(
            "vertices\t{}\nedges\t{}\nattributes\t{}\nentries\t{}\n",
            g.num_vertices(),
            g.num_edges(),
            g.num_attrs(),
            idx.entry_count()
        ),
    )?;
    Ok(EXIT_OK)
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut Vec<u8>) -> Outcome {
    let (g, _) = load_edge_list(&a.graph)?;
    let truss = truss_decompose(&Subgraph::full(&g));
    let mut text = String::new();
    let mut rows: Vec<(u64, u64, u32)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let (x, y) = (g.ext_id(u), g.ext_id(v));
            (x.min(y), x.max(y), truss.edge[e])
        })
        .collect();
    rows.sort_unstable();
    for (u, v, t) in rows {
        let _ = writeln!(text, "{u}\t{v}\t{t}");
    }
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn ext_ids(g: &Graph, vertices: &[VertexId]) -> Vec<u64> {
    let mut ids: Vec<u64> = vertices.iter().map(|&v| g.ext_id(v)).collect();
    ids.sort_unstable();
    ids
}

fn labels(g: &Graph, q: &QuerySpec) -> Vec<String> {
    let mut l: Vec<String> = q
        .attrs
        .iter()
        .map(|&w| g.attr_label(w).to_owned())
        .collect();
    l.sort_unstable();
    l
}

fn result_json(g: &Graph, res: &SearchResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("vertices".into(), json!(ext_ids(g, &res.vertices)));
    m.insert("score".into(), json!(format_score(&res.score)));
    m.insert("k".into(), json!(res.k));
    m.insert("d".into(), json!(res.query_distance));
    m.insert("diameter".into(), json!(res.diameter));
    m.insert("algo".into(), json!(res.algo.name()));
    m.insert("status".into(), json!("ok"));
    m.insert("suggestions".into(), json!([]));
    m
}

fn empty_json(q: &QuerySpec, algo: Algorithm, status: &str, reason: String) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("vertices".into(), json!([]));
    m.insert(
        "score".into(),
        json!(format_score(&Rational::from_integer(0))),
    );
    m.insert("k".into(), json!(q.k));
    m.insert("d".into(), Value::Null);
    m.insert("diameter".into(), Value::Null);
    m.insert("algo".into(), json!(algo.name()));
    m.insert("status".into(), json!(status));
    m.insert("reason".into(), json!(reason));
    m.insert("suggestions".into(), json!([]));
    m
}

fn infeasible_reason(why: Infeasible) -> String {
    match why {
        Infeasible::QueryNodePruned => "no_truss".into(),
        Infeasible::QueryNodesDisconnected => "disconnected".into(),
    }
}

fn cmd_query(a: &QueryArgs, out: &mut Vec<u8>) -> Outcome {
    let (g, idx) = load_input(
        a.graph.as_deref(),
        a.attr_file.as_deref(),
        a.index.as_deref(),
    )?;
    let nodes = a
        .nodes
        .iter()
        .map(|&ext| g.vertex_of(ext).ok_or(Error::UnknownVertex(ext)))
        .collect::<crate::Result<Vec<_>>>()?;
    let attrs = a
        .attrs
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            g.attr_id(s)
                .ok_or_else(|| Error::UnknownAttribute(s.clone()))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut q = QuerySpec::new(&nodes, &attrs).with_kd(a.k, a.d);
    q.gamma = a.gamma;
    q.epsilon = a.epsilon;
    q.eta = a.eta;
    q.auto_kd = a.auto_kd;
    if q.auto_kd && a.algo != Algorithm::Local {
        return Err(Failure {
            code: EXIT_USAGE,
            msg: "--auto-kd requires --algo local".into(),
        });
    }
    q.validate(&g)?;

    let mut bad = None;
    if a.suggest_on_bad && !q.auto_kd {
        if let QueryClass::Bad {
            reason,
            suggestions,
        } = classify_query(&g, &q)?
        {
            let mut m = empty_json(&q, a.algo, "bad_query", reason.to_string());
            let list: Vec<Value> = suggestions
                .iter()
                .map(|s| json!({"nodes": ext_ids(&g, &s.nodes), "attrs": labels(&g, s)}))
                .collect();
            m.insert("suggestions".into(), Value::Array(list));
            bad = Some(m);
        }
    }
    let obj = match bad {
        Some(m) => m,
        None => {
            let built;
            let idx = match (&idx, a.algo) {
                (Some(idx), _) => Some(idx),
                (None, Algorithm::Local) => {
                    built = build_index(&g);
                    Some(&built)
                }
                (None, _) => None,
            };
            match crate::eval::run_algorithm(&g, idx, a.algo, &q) {
                Ok(res) => result_json(&g, &res),
                Err(Error::NoCommunity(why)) => {
                    empty_json(&q, a.algo, "infeasible", infeasible_reason(why))
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let ok = obj.get("status") == Some(&json!("ok"));
    let line = serde_json::to_string(&Value::Object(obj)).expect("serializable");
    emit(out, format!("{line}\n"))?;
    Ok(if !ok && a.fail_on_empty {
        EXIT_EMPTY
    } else {
        EXIT_OK
    })
}

fn cmd_gen(a: &GenArgs, out: &mut Vec<u8>) -> Outcome {
    if a.communities == 0 || a.n / a.communities == 0 {
        return Err(Error::Config("--communities must be between 1 and --n".into()).into());
    }
    let defaults = GenConfig::default();
    let max_size = defaults.max_size.min(a.n / a.communities);
    let cfg = GenConfig {
        n: a.n,
        communities: a.communities,
        min_size: defaults.min_size.min(max_size),
        max_size,
        seed: a.seed,
        ..defaults
    };
    let (g, mut gt) = generate_graph(&cfg)?;
    let plant = PlantConfig {
        coverage: a.coverage,
        seed: a.seed.wrapping_add(1),
        ..PlantConfig::default()
    };
    let g = plant_attributes(g, &mut gt, &plant)?;
    let queries = gen_queries(&g, &gt, a.queries, (1, 16), 2, a.seed.wrapping_add(2))?;
    write_dataset(&a.out_prefix, &g, &gt, &queries)?;
    emit(
        out,
        format!(
            "vertices\t{}\nedges\t{}\ncommunities\t{}\nattributes\t{}\nqueries\t{}\n",
            g.num_vertices(),
            g.num_edges(),
            gt.communities.len(),
            g.num_attrs(),
            queries.len()
        ),
    )?;
    Ok(EXIT_OK)
}

fn cmd_eval(a: &EvalArgs, out: &mut Vec<u8>) -> Outcome {
    let (g, idx) = load_input(a.graph.as_deref(), a.attrs.as_deref(), a.index.as_deref())?;
    let idx = match idx {
        Some(idx) => Some(idx),
        None if a.algo == Algorithm::Local => Some(build_index(&g)),
        None => None,
    };
    let gt = load_truth(&a.truth, &g)?;
    let queries = load_queries(&a.queries, &g)?;
    let report = evaluate(&g, idx.as_ref(), &gt, &queries, a.algo)?;
    let tsv = report.to_tsv(a.timing);
    match &a.report {
        Some(path) => {
            write_file(path, &tsv)?;
            emit(
                out,
                tsv.lines()
                    .last()
                    .map(|l| format!("{l}\n"))
                    .as_deref()
                    .unwrap_or(""),
            )?;
        }
        None => emit(out, &tsv)?,
    }
    Ok(EXIT_OK)
}
