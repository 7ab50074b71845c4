//! `cldsim` command line.
//!
//! Exit status: 0 on full success, 1 for bad input (unreadable or invalid
//! graphs, missing embeddings, rejected corpus files), 2 for usage errors and
//! 70 when an internal invariant fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::embed::{EmbedSource, EmbeddingProvider};
use crate::graph::{read_graph_file, stats, GraphError, ValidationWarning};
use crate::kernels::{KernelConfig, KernelError};
use crate::pipeline::{
    self, parse_metric_list, CompareOptions, ComparisonReport, MetricId, NamedGraph,
    PerturbationPlan, PipelineError,
};
use crate::semantic::Strategy;

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "cldsim", version, about = "Semantic and structural similarity of causal loop diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format; json and csv are machine formats.
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write machine output here instead of standard output. For `batch`
    /// this is a directory receiving reports and summary files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Scoring {
    /// Kernel hyperparameters as a JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Semantic aggregation strategy.
    #[arg(long, default_value = "ref_best_match", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Embedding source: file:<path>, http:<url> or det:seed=<s>,dim=<d>.
    #[arg(long)]
    embed: Option<String>,
    /// Persistent embedding cache layered over --embed.
    #[arg(long, requires = "embed")]
    embed_cache: Option<PathBuf>,
    /// Metrics to compute, e.g. m1,m2,g5.
    #[arg(long, value_parser = parse_metrics)]
    metrics: Option<MetricList>,
    /// Timestamp recorded in reports; omitted by default so reruns are
    /// byte-identical.
    #[arg(long)]
    timestamp: Option<String>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Debug, Clone)]
struct MetricList(Vec<MetricId>);

fn parse_metrics(s: &str) -> Result<MetricList, String> {
    parse_metric_list(s).map(MetricList)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare one graph against a reference.
    Compare {
        reference: PathBuf,
        cmp: PathBuf,
        #[command(flatten)]
        scoring: Scoring,
        #[command(flatten)]
        output: Output,
    },
    /// Compare every graph file in a directory against a reference.
    Batch {
        reference: PathBuf,
        dir: PathBuf,
        #[command(flatten)]
        scoring: Scoring,
        #[command(flatten)]
        output: Output,
        /// Parallel comparisons.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Graph-level statistics.
    Stats {
        graph: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Write a seeded corpus of perturbed copies of a reference graph.
    Perturb {
        reference: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        seed: u64,
        /// Operation counts, e.g. rename_node=2,delete_edge=1.
        #[arg(long, default_value = "")]
        ops: String,
        /// Upper bound on node count for add_node.
        #[arg(long, default_value_t = pipeline::PerturbationPlan::new(0).max_nodes)]
        max_nodes: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Parse and validate a graph file.
    Validate {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn status(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Kernel(KernelError::NegativeSelfKernel(_)) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Runs the CLI with process streams. Returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams. Human-readable text and
/// machine output never share `stdout`: with a machine format and no
/// `--out`, `stdout` carries only the machine output.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                0
            };
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        dispatch(cli.command, &mut *stdout, &mut *stderr)
    }));
    match outcome {
        Ok(Ok(status)) => status,
        Ok(Err(f)) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.status()
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal invariant violated");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Compare {
            reference,
            cmp,
            scoring,
            output,
        } => run_compare(&reference, &cmp, &scoring, &output, stdout, stderr),
        Command::Batch {
            reference,
            dir,
            scoring,
            output,
            jobs,
        } => run_batch(&reference, &dir, &scoring, &output, jobs as usize, stdout, stderr),
        Command::Stats { graph, output } => run_stats(&graph, &output, stdout, stderr),
        Command::Perturb {
            reference,
            n,
            seed,
            ops,
            max_nodes,
            out,
            format,
        } => {
            let g = load(&reference, stderr)?;
            let mut plan = PerturbationPlan::parse_ops(seed, &ops)?;
            plan.max_nodes = max_nodes;
            let manifest = pipeline::perturb_corpus(&g, &plan, n as usize, &out)?;
            match format {
                Format::Json => emit(stdout, &pretty(&manifest))?,
                Format::Csv => return Err(Failure::Input("perturb has no csv output".into())),
                Format::Human => {
                    let skipped = manifest
                        .graphs
                        .iter()
                        .flat_map(|g| &g.ops)
                        .filter(|o| o.skipped)
                        .count();
                    let text = format!(
                        "wrote {} graphs to {} (seed {}, {} ops per graph, {} skipped in total)\n",
                        manifest.graphs.len(),
                        out.display(),
                        seed,
                        plan.op_count(),
                        skipped
                    );
                    emit(stdout, &text)?;
                }
            }
            Ok(0)
        }
        Command::Validate { graph, format } => {
            let g = read_graph_file(&graph)?;
            let warnings: Vec<String> = g.warnings().iter().map(describe_warning).collect();
            match format {
                Format::Json => {
                    let v = serde_json::json!({
                        "valid": true,
                        "nodes": g.node_count(),
                        "edges": g.edge_count(),
                        "warnings": warnings,
                    });
                    emit(stdout, &pretty(&v))?;
                }
                Format::Csv => return Err(Failure::Input("validate has no csv output".into())),
                Format::Human => {
                    for w in &warnings {
                        let _ = writeln!(stderr, "warning: {w}");
                    }
                    emit(
                        stdout,
                        &format!("valid: {} nodes, {} edges\n", g.node_count(), g.edge_count()),
                    )?;
                }
            }
            Ok(0)
        }
    }
}

fn describe_warning(w: &ValidationWarning) -> String {
    match w {
        ValidationWarning::DuplicateName { name, ids } => {
            format!("name {name:?} is shared by nodes {}", ids.join(", "))
        }
    }
}

fn load(path: &Path, stderr: &mut dyn Write) -> Result<crate::graph::CausalGraph, Failure> {
    let g = read_graph_file(path)?;
    for w in g.warnings() {
        let _ = writeln!(stderr, "warning: {}: {}", path.display(), describe_warning(&w));
    }
    Ok(g)
}

fn file_id(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn options(scoring: &Scoring) -> Result<CompareOptions, Failure> {
    let kernel = match &scoring.config {
        None => KernelConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            let cfg: KernelConfig = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            cfg.validate()
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            cfg
        }
    };
    Ok(CompareOptions {
        kernel,
        strategy: scoring.strategy,
        metrics: scoring
            .metrics
            .as_ref()
            .map_or_else(|| MetricId::ALL.to_vec(), |m| m.0.clone()),
    })
}

fn provider(scoring: &Scoring) -> Result<Option<Arc<dyn EmbeddingProvider>>, Failure> {
    let Some(spec) = &scoring.embed else {
        return Ok(None);
    };
    let source: EmbedSource = spec.parse().map_err(|e: crate::embed::EmbedError| Failure::Input(e.to_string()))?;
    source
        .open(scoring.embed_cache.as_deref())
        .map(Some)
        .map_err(|e| Failure::Input(e.to_string()))
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Input(format!("<stdout>: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn label(m: MetricId) -> &'static str {
    match m {
        MetricId::M1 => "BLEU",
        MetricId::M2 => "fuzzy ratio",
        MetricId::M3 => "cosine",
        MetricId::M4 => "negative euclidean",
        MetricId::G1 => "pyramid match",
        MetricId::G2 => "shortest path",
        MetricId::G3 => "subgraph matching",
        MetricId::G4 => "WL vertex histogram",
        MetricId::G5 => "WL edge histogram",
    }
}

fn check_scales(reports: &[ComparisonReport]) -> Result<(), Failure> {
    for r in reports {
        for (m, v) in r.scores() {
            if !m.in_scale(v) {
                return Err(Failure::Internal(format!("{m} = {v} is outside its scale for {}", r.cmp_id)));
            }
        }
    }
    Ok(())
}

fn human_report(r: &ComparisonReport) -> String {
    let mut s = format!("reference: {}\ncomparison: {}\n", r.ref_id, r.cmp_id);
    s += &format!("strategy: {}\n", r.config_echo.strategy);
    if let Some(p) = &r.config_echo.provider_id {
        s += &format!("embeddings: {p}\n");
    }
    for (m, v) in r.scores() {
        s += &format!("  {}  {:<20} {:>9.4}\n", m.id().to_uppercase(), label(m), v);
    }
    s
}

fn run_compare(
    reference: &Path,
    cmp: &Path,
    scoring: &Scoring,
    output: &Output,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let opts = options(scoring)?;
    let r = NamedGraph::new(file_id(reference), load(reference, stderr)?);
    let c = NamedGraph::new(file_id(cmp), load(cmp, stderr)?);
    let p = provider(scoring)?;
    let mut report = pipeline::compare(&r, &c, p.as_deref(), &opts)?;
    report.timestamp = scoring.timestamp.clone();
    check_scales(std::slice::from_ref(&report))?;
    let machine = match output.format {
        Format::Human => None,
        Format::Json => Some(pretty(&report)),
        Format::Csv => Some(pipeline::reports_to_csv(std::slice::from_ref(&report))),
    };
    match (machine, &output.out) {
        (None, _) => emit(stdout, &human_report(&report))?,
        (Some(text), None) => emit(stdout, &text)?,
        (Some(text), Some(path)) => {
            write_file(path, &text)?;
            emit(stdout, &human_report(&report))?;
        }
    }
    Ok(0)
}

fn human_batch(out: &pipeline::BatchOutput) -> String {
    let mut s = format!("{} reports, {} rejected\n", out.reports.len(), out.rejects.len());
    s += "metric    count      min   median     mean      max\n";
    for summary in out.summaries.values() {
        s += &format!(
            "{:<6} {:>8} {:>8.4} {:>8.4} {:>8.4} {:>8.4}\n",
            summary.metric.id().to_uppercase(),
            summary.count,
            summary.min,
            summary.median,
            summary.mean,
            summary.max
        );
    }
    for r in &out.rejects {
        s += &format!("rejected {}: {}\n", r.file, r.error);
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn run_batch(
    reference: &Path,
    dir: &Path,
    scoring: &Scoring,
    output: &Output,
    jobs: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let opts = options(scoring)?;
    let r = NamedGraph::new(file_id(reference), load(reference, stderr)?);
    let p = provider(scoring)?;
    let mut out = pipeline::batch(&r, dir, p.as_deref(), &opts, jobs)?;
    for report in &mut out.reports {
        report.timestamp = scoring.timestamp.clone();
    }
    check_scales(&out.reports)?;
    match (&output.out, output.format) {
        (Some(out_dir), format) => {
            std::fs::create_dir_all(out_dir).map_err(|e| io_failure(out_dir, e))?;
            write_file(&out_dir.join("reports.json"), &pipeline::reports_to_json(&out.reports))?;
            write_file(&out_dir.join("summary.json"), &pipeline::summaries_to_json(&out.summaries))?;
            write_file(&out_dir.join("rejects.json"), &pretty(&out.rejects))?;
            if format == Format::Csv {
                write_file(&out_dir.join("reports.csv"), &pipeline::reports_to_csv(&out.reports))?;
            }
            emit(stdout, &human_batch(&out))?;
        }
        (None, Format::Human) => emit(stdout, &human_batch(&out))?,
        (None, Format::Json) => emit(stdout, &pretty(&out))?,
        (None, Format::Csv) => emit(stdout, &pipeline::reports_to_csv(&out.reports))?,
    }
    if out.rejects.is_empty() {
        Ok(0)
    } else {
        if output.format != Format::Human || output.out.is_some() {
            let _ = writeln!(stderr, "{} corpus files rejected", out.rejects.len());
        }
        Ok(EXIT_INPUT)
    }
}

fn run_stats(
    path: &Path,
    output: &Output,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = load(path, stderr)?;
    let s = stats(&g)?;
    let machine = match output.format {
        Format::Human => None,
        Format::Json => Some(pretty(&s)),
        Format::Csv => {
            let conn = s.avg_connectivity.map(|c| c.to_string()).unwrap_or_default();
            Some(format!(
                "n,m,cycles,density,transitivity,avg_connectivity\n{},{},{},{},{},{}\n",
                s.n, s.m, s.cycles, s.density, s.transitivity, conn
            ))
        }
    };
    let human = || {
        let conn = s
            .avg_connectivity
            .map_or("undefined".to_owned(), |c| format!("{c:.4}"));
        format!(
            "n={} m={} cycles={}\ndensity={:.4} transitivity={:.4} avg_connectivity={}\n",
            s.n, s.m, s.cycles, s.density, s.transitivity, conn
        )
    };
    match (machine, &output.out) {
        (None, _) => emit(stdout, &human())?,
        (Some(text), None) => emit(stdout, &text)?,
        (Some(text), Some(out)) => {
            write_file(out, &text)?;
            emit(stdout, &human())?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("cldsim").chain(args.iter().copied());
        let status = run_with(argv, &mut out, &mut err);
        (
            status,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["compare", "a"]).0, EXIT_USAGE);
        assert_eq!(call(&["stats", "a", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["compare", "a", "b", "--metrics", "m9"]).0, EXIT_USAGE);
        assert_eq!(call(&["compare", "a", "b", "--embed-cache", "c.tsv"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_exit_1() {
        let (status, out, err) = call(&["stats", "/nonexistent/graph.json"]);
        assert_eq!(status, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.contains("/nonexistent/graph.json"));
    }
}
