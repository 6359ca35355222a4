//! `qpn`: query, transform and check qualitative probabilistic networks.
//!
//! Exit status is 0 on success, 1 when the network or the request is
//! rejected by the engine, and 2 on malformed command lines.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qpn_core::network::{Diagnostic, LoadError};
use qpn_core::oracle::{soundness_report, OracleConfig, OracleError, OracleQuery};
use qpn_core::transforms::{apply, SynergyMode, TraceStep, TransformOp};
use qpn_core::{
    d_separated, explain, explain_synergy, load_network, qualitative_influence, serialize, synergy_query, to_dot,
    D_separated, InfluenceQuery, Qpn, QueryError, SeparationQuery, Sign, SynergyQuery, TransformError,
};

#[derive(Parser)]
#[command(name = "qpn", version, about = "Qualitative probabilistic networks with deterministic nodes")]
struct Cli {
    /// Output mode; `json` writes one document per invocation.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sign of the influence of one node on another.
    QueryInfluence {
        network: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
        /// Print the transformation trace.
        #[arg(long)]
        explain: bool,
    },
    /// Sign of the synergy of two nodes on a child.
    QuerySynergy {
        network: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        child: String,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
        #[arg(long)]
        explain: bool,
    },
    /// Classical and functional separation of two nodes.
    Dsep {
        network: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Apply one operation and print the resulting network.
    Transform {
        network: PathBuf,
        /// reverse:c,d | dnp:c | dnp:c,d | reduce:c | barren:c
        #[arg(long)]
        op: TransformOp,
    },
    /// Check an engine answer against sampled numeric networks.
    Oracle {
        network: PathBuf,
        #[arg(long, requires = "to", conflicts_with_all = ["a", "b", "child"])]
        from: Option<String>,
        #[arg(long, requires = "from")]
        to: Option<String>,
        #[arg(long, requires_all = ["b", "child"])]
        a: Option<String>,
        #[arg(long, requires_all = ["a", "child"])]
        b: Option<String>,
        #[arg(long, requires_all = ["a", "b"])]
        child: Option<String>,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cardinality override, repeatable.
        #[arg(long = "card", value_name = "NODE=K", value_parser = parse_card)]
        cards: Vec<(String, usize)>,
        /// Margin required by strict probabilistic relations.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Tolerance for equalities.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Write the network in Graphviz DOT.
    ExportDot { network: PathBuf },
    /// Check a network file.
    Validate { network: PathBuf },
}

fn parse_card(s: &str) -> Result<(String, usize), String> {
    let (node, k) = s.split_once('=').ok_or("expected NODE=K")?;
    let k: usize = k.parse().map_err(|_| format!("`{k}` is not a count"))?;
    Ok((node.to_string(), k))
}

/// A request the engine turned down.
#[derive(Serialize)]
struct Failure {
    message: String,
    hint: Option<String>,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn new(message: impl ToString, hint: &str) -> Self {
        Failure { message: message.to_string(), hint: Some(hint.to_string()), diagnostics: Vec::new() }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Failure::new(&e, e.hint())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        Failure::new(&e, e.hint())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::new(&e, e.hint())
    }
}

fn load(path: &Path) -> Result<Qpn, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(format!("{}: {e}", path.display()), "check the network path"))?;
    load_network(&text).map_err(|e: LoadError| Failure {
        message: format!("{}: invalid network", path.display()),
        hint: None,
        diagnostics: e.diagnostics,
    })
}

#[derive(Serialize)]
struct InfluenceReport<'a> {
    query: &'a InfluenceQuery,
    sign: Sign,
    separated: bool,
    lookahead: Option<&'a str>,
    trace: &'a [TraceStep],
    final_network: String,
    explanation: Option<String>,
}

#[derive(Serialize)]
struct SynergyReport<'a> {
    query: &'a SynergyQuery,
    sign: Sign,
    blocked: Option<&'a str>,
    trace: &'a [TraceStep],
    final_network: String,
    explanation: Option<String>,
}

#[derive(Serialize)]
struct SeparationReport<'a> {
    x: &'a str,
    y: &'a str,
    given: &'a [String],
    #[serde(rename = "D_separated")]
    functional: bool,
    d_separated: bool,
}

#[derive(Serialize)]
struct TransformReport<'a> {
    step: &'a TraceStep,
    network: String,
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize)]
struct DotReport {
    dot: String,
}

/// What a successful run prints in each mode.
struct Output {
    text: String,
    json: serde_json::Value,
}

impl Output {
    fn new(text: String, report: &impl Serialize) -> Self {
        Output { text, json: serde_json::to_value(report).expect("reports serialize") }
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::QueryInfluence { network, from, to, given, explain: verbose } => {
            let net = load(&network)?;
            let q = InfluenceQuery::new(&from, &to, given);
            let r = qualitative_influence(&net, &q)?;
            let explanation = verbose.then(|| explain(&r));
            let text = explanation.clone().unwrap_or_else(|| format!("{}\n", r.sign));
            let report = InfluenceReport {
                query: &q,
                sign: r.sign,
                separated: r.separated,
                lookahead: r.lookahead.as_deref(),
                trace: &r.trace.steps,
                final_network: serialize(&r.final_net),
                explanation,
            };
            Ok(Output::new(text, &report))
        }
        Command::QuerySynergy { network, a, b, child, given, explain: verbose } => {
            let net = load(&network)?;
            let q = SynergyQuery::new(&a, &b, &child, given);
            let r = synergy_query(&net, &q)?;
            let explanation = verbose.then(|| explain_synergy(&q, &r));
            let text = explanation.clone().unwrap_or_else(|| format!("{}\n", r.sign));
            let report = SynergyReport {
                query: &q,
                sign: r.sign,
                blocked: r.blocked.as_deref(),
                trace: &r.trace.steps,
                final_network: serialize(&r.final_net),
                explanation,
            };
            Ok(Output::new(text, &report))
        }
        Command::Dsep { network, x, y, given } => {
            let net = load(&network)?;
            let q = SeparationQuery::new(&x, &y, given.iter());
            let functional = D_separated(&net, &q)?;
            let classical = d_separated(&net, &q)?;
            let text = format!("D-separated: {functional}, d-separated: {classical}\n");
            let report = SeparationReport { x: &x, y: &y, given: &given, functional, d_separated: classical };
            Ok(Output::new(text, &report))
        }
        Command::Transform { network, op } => {
            let net = load(&network)?;
            let (out, step) = apply(&net, &op, SynergyMode::Invalidate)?;
            let text = format!("{step}\n{}", serialize(&out));
            Ok(Output::new(text, &TransformReport { step: &step, network: serialize(&out) }))
        }
        Command::Oracle { network, from, to, a, b, child, given, trials, seed, cards, epsilon, tolerance } => {
            let net = load(&network)?;
            let query = match (from, to, a, b, child) {
                (Some(from), Some(to), ..) => OracleQuery::Influence(InfluenceQuery::new(&from, &to, given)),
                (_, _, Some(a), Some(b), Some(child)) => OracleQuery::Synergy(SynergyQuery::new(&a, &b, &child, given)),
                _ => Cli::command()
                    .error(ErrorKind::MissingRequiredArgument, "oracle needs --from/--to or --a/--b/--child")
                    .exit(),
            };
            let mut cfg = OracleConfig::default().with_trials(trials).with_seed(seed);
            cfg.cardinalities = cards.into_iter().collect::<BTreeMap<_, _>>();
            if let Some(e) = epsilon {
                cfg.epsilon = e;
            }
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            let verdict = soundness_report(&net, &query, &cfg)?;
            Ok(Output::new(verdict.to_string(), &verdict))
        }
        Command::ExportDot { network } => {
            let dot = to_dot(&load(&network)?);
            Ok(Output::new(dot.clone(), &DotReport { dot }))
        }
        Command::Validate { network } => {
            let net = load(&network)?;
            let report = ValidateReport { valid: true, nodes: net.node_count(), edges: net.edge_count() };
            let text = format!("valid: {} nodes, {} edges\n", report.nodes, report.edges);
            Ok(Output::new(text, &report))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let json = cli.format == Format::Json;
    match run(cli.command) {
        Ok(out) if json => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("json values print"));
            ExitCode::SUCCESS
        }
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            for d in &failure.diagnostics {
                eprintln!("  {d}");
            }
            if let Some(hint) = &failure.hint {
                eprintln!("hint: {hint}");
            }
            if json {
                let doc = serde_json::json!({ "error": failure });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json values print"));
            }
            ExitCode::from(1)
        }
    }
}
