use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compare, summarize, CompareOptions, ComparisonReport, DistributionSummary, NamedGraph, PipelineError};
use crate::embed::EmbeddingProvider;
use crate::graph::read_graph_file;

/// A corpus file that could not be parsed or compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub file: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchOutput {
    /// Sorted by `cmp_id`.
    pub reports: Vec<ComparisonReport>,
    pub summaries: BTreeMap<String, DistributionSummary>,
    pub rejects: Vec<Reject>,
}

fn is_graph_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if name.ends_with(".manifest.json") {
        return false;
    }
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("json" | "mmd" | "cld")
    )
}

/// Graph files (`.json`, `.mmd`, `.cld`, excluding manifests) directly inside
/// `dir`, sorted by file name.
pub fn list_corpus(dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let entries = std::fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| PipelineError::io(dir, e))?.path();
        if path.is_file() && is_graph_file(&path) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn in_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    if jobs <= 1 {
        return Ok(work());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::Io {
            path: "<thread pool>".into(),
            message: e.to_string(),
        })?;
    Ok(pool.install(work))
}

/// Compares every graph in `corpus` against `reference` and summarizes each
/// requested metric. Comparison failures become rejects.
pub fn batch_graphs(
    reference: &NamedGraph,
    corpus: &[NamedGraph],
    provider: Option<&dyn EmbeddingProvider>,
    opts: &CompareOptions,
    jobs: usize,
) -> Result<BatchOutput, PipelineError> {
    opts.kernel.validate()?;
    let run = |g: &NamedGraph| compare(reference, g, provider, opts).map_err(|e| (g.id.clone(), e));
    let results: Vec<_> = in_pool(jobs, || {
        if jobs <= 1 {
            corpus.iter().map(run).collect()
        } else {
            corpus.par_iter().map(run).collect()
        }
    })?;
    let mut reports = Vec::new();
    let mut rejects = Vec::new();
    for r in results {
        match r {
            Ok(report) => reports.push(report),
            Err((file, e)) => rejects.push(Reject {
                file,
                error: e.to_string(),
            }),
        }
    }
    reports.sort_by(|a, b| a.cmp_id.cmp(&b.cmp_id));
    rejects.sort_by(|a, b| a.file.cmp(&b.file));
    let mut summaries = BTreeMap::new();
    for &metric in &opts.metrics {
        let values: Vec<f64> = reports.iter().filter_map(|r| r.get(metric)).collect();
        if !values.is_empty() {
            summaries.insert(metric.id().to_owned(), summarize(&values, metric)?);
        }
    }
    Ok(BatchOutput {
        reports,
        summaries,
        rejects,
    })
}

/// Reads every graph file in `corpus_dir` and runs [`batch_graphs`]. Files
/// that fail to parse are listed as rejects and do not stop the run.
pub fn batch(
    reference: &NamedGraph,
    corpus_dir: &Path,
    provider: Option<&dyn EmbeddingProvider>,
    opts: &CompareOptions,
    jobs: usize,
) -> Result<BatchOutput, PipelineError> {
    let files = list_corpus(corpus_dir)?;
    if files.is_empty() {
        return Err(PipelineError::EmptyCorpus(corpus_dir.display().to_string()));
    }
    let mut corpus = Vec::new();
    let mut parse_rejects = Vec::new();
    for path in files {
        let id = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match read_graph_file(&path) {
            Ok(graph) => corpus.push(NamedGraph::new(id, graph)),
            Err(e) => parse_rejects.push(Reject {
                file: id,
                error: e.to_string(),
            }),
        }
    }
    let mut out = batch_graphs(reference, &corpus, provider, opts, jobs)?;
    out.rejects.extend(parse_rejects);
    out.rejects.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(out)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// JSON array of reports.
pub fn reports_to_json(reports: &[ComparisonReport]) -> String {
    pretty(&reports)
}

/// One row per report: `cmp_id,m1,m2,m3,m4,g1,g2,g3,g4,g5`; metrics that
/// were not requested are empty cells.
pub fn reports_to_csv(reports: &[ComparisonReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cmp_id".to_owned()];
    header.extend(super::MetricId::ALL.iter().map(|m| m.id().to_owned()));
    w.write_record(&header).expect("in-memory write");
    for r in reports {
        let mut row = vec![r.cmp_id.clone()];
        row.extend(
            super::MetricId::ALL
                .iter()
                .map(|&m| r.get(m).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// JSON object keyed by metric id.
pub fn summaries_to_json(summaries: &BTreeMap<String, DistributionSummary>) -> String {
    pretty(summaries)
}
