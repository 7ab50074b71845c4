//! Reference-vs-corpus comparison: per-pair reports, batch runs with
//! distribution summaries, and seeded perturbation corpora.

mod batch;
mod metrics;
mod perturb;
mod summary;

use serde::{Deserialize, Serialize};

pub use batch::{
    batch, batch_graphs, list_corpus, reports_to_csv, reports_to_json, summaries_to_json,
    BatchOutput, Reject,
};
pub use metrics::{parse_metric_list, MetricId};
pub use perturb::{
    perturb_corpus, perturb_graph, rename_all, AppliedOp, CorpusManifest, ManifestEntry,
    PerturbKind, PerturbationPlan,
};
pub use summary::{summarize, DistributionSummary, Histogram, BINS};

use crate::embed::EmbeddingProvider;
use crate::graph::{CausalGraph, GraphError};
use crate::kernels::{KernelConfig, KernelError};
use crate::semantic::{score_metrics, SemanticError, Strategy};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("corpus {0} contains no graph files")]
    EmptyCorpus(String),
    #[error("no {0} values to summarize")]
    EmptySummary(MetricId),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid perturbation plan: {0}")]
    InvalidPlan(String),
}

impl PipelineError {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

/// A graph together with the identifier used in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub id: String,
    pub graph: CausalGraph,
}

impl NamedGraph {
    pub fn new(id: impl Into<String>, graph: CausalGraph) -> Self {
        NamedGraph {
            id: id.into(),
            graph,
        }
    }
}

/// Everything besides the two graphs and the provider that determines a
/// report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub kernel: KernelConfig,
    pub strategy: Strategy,
    pub metrics: Vec<MetricId>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            kernel: KernelConfig::default(),
            strategy: Strategy::default(),
            metrics: MetricId::ALL.to_vec(),
        }
    }
}

impl CompareOptions {
    pub fn needs_provider(&self) -> bool {
        self.metrics
            .iter()
            .any(|m| m.semantic().is_some_and(|s| s.needs_embeddings()))
    }
}

/// Semantic scores; metrics that were not requested are `null`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticPart {
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub m4: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelPart {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub g4: Option<f64>,
    pub g5: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub kernel: KernelConfig,
    pub strategy: Strategy,
    pub provider_id: Option<String>,
    pub metrics: Vec<MetricId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ref_id: String,
    pub cmp_id: String,
    pub semantic: SemanticPart,
    pub kernels: KernelPart,
    pub config_echo: ConfigEcho,
    pub timestamp: Option<String>,
}

impl ComparisonReport {
    pub fn get(&self, metric: MetricId) -> Option<f64> {
        let (s, k) = (&self.semantic, &self.kernels);
        match metric {
            MetricId::M1 => s.m1,
            MetricId::M2 => s.m2,
            MetricId::M3 => s.m3,
            MetricId::M4 => s.m4,
            MetricId::G1 => k.g1,
            MetricId::G2 => k.g2,
            MetricId::G3 => k.g3,
            MetricId::G4 => k.g4,
            MetricId::G5 => k.g5,
        }
    }

    fn set(&mut self, metric: MetricId, value: f64) {
        let (s, k) = (&mut self.semantic, &mut self.kernels);
        let slot = match metric {
            MetricId::M1 => &mut s.m1,
            MetricId::M2 => &mut s.m2,
            MetricId::M3 => &mut s.m3,
            MetricId::M4 => &mut s.m4,
            MetricId::G1 => &mut k.g1,
            MetricId::G2 => &mut k.g2,
            MetricId::G3 => &mut k.g3,
            MetricId::G4 => &mut k.g4,
            MetricId::G5 => &mut k.g5,
        };
        *slot = Some(value);
    }

    /// Requested scores in canonical metric order.
    pub fn scores(&self) -> Vec<(MetricId, f64)> {
        MetricId::ALL
            .into_iter()
            .filter_map(|m| self.get(m).map(|v| (m, v)))
            .collect()
    }
}

/// Scores `cmp` against `reference`. The provider is only consulted for the
/// embedding metrics and may be `None` when none are requested.
pub fn compare(
    reference: &NamedGraph,
    cmp: &NamedGraph,
    provider: Option<&dyn EmbeddingProvider>,
    opts: &CompareOptions,
) -> Result<ComparisonReport, PipelineError> {
    opts.kernel.validate()?;
    let mut report = ComparisonReport {
        ref_id: reference.id.clone(),
        cmp_id: cmp.id.clone(),
        semantic: SemanticPart::default(),
        kernels: KernelPart::default(),
        config_echo: ConfigEcho {
            kernel: opts.kernel.clone(),
            strategy: opts.strategy,
            provider_id: provider
                .filter(|_| opts.needs_provider())
                .map(|p| p.provider_id().to_owned()),
            metrics: opts.metrics.clone(),
        },
        timestamp: None,
    };
    let semantic: Vec<_> = opts.metrics.iter().filter_map(|m| m.semantic()).collect();
    if !semantic.is_empty() {
        let provider = if opts.needs_provider() { provider } else { None };
        let scores = score_metrics(&reference.graph, &cmp.graph, provider, opts.strategy, &semantic)?;
        for (metric, value) in scores {
            let id = MetricId::ALL
                .into_iter()
                .find(|m| m.semantic() == Some(metric))
                .expect("every semantic metric has an id");
            report.set(id, value);
        }
    }
    for &metric in &opts.metrics {
        if let Some(kernel) = metric.kernel() {
            report.set(metric, kernel.compute(&reference.graph, &cmp.graph, &opts.kernel)?);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::DeterministicProvider;
    use crate::reference::limits_to_growth;

    fn det() -> DeterministicProvider {
        DeterministicProvider::new(7, 32).unwrap()
    }

    #[test]
    fn self_comparison_hits_maxima() {
        let r = NamedGraph::new("ref", limits_to_growth());
        let report = compare(&r, &r, Some(&det()), &CompareOptions::default()).unwrap();
        for (m, v) in report.scores() {
            assert_eq!(v, m.maximum(), "{m}");
        }
        assert_eq!(report.scores().len(), 9);
        assert_eq!(report.config_echo.provider_id.as_deref(), Some("det:seed=7,dim=32"));
    }

    #[test]
    fn empty_comparison_fails_on_semantic_path() {
        let r = NamedGraph::new("ref", limits_to_growth());
        let e = NamedGraph::new("empty", CausalGraph::empty());
        let err = compare(&r, &e, Some(&det()), &CompareOptions::default()).unwrap_err();
        assert!(matches!(err, PipelineError::Semantic(SemanticError::EmptyGraph(_))));
    }

    #[test]
    fn rename_all_pattern() {
        let r = NamedGraph::new("ref", limits_to_growth());
        let c = NamedGraph::new("renamed", rename_all(&r.graph, 3));
        let report = compare(&r, &c, Some(&det()), &CompareOptions::default()).unwrap();
        let k = report.kernels;
        assert_eq!(
            [k.g1, k.g2, k.g3, k.g4, k.g5],
            [Some(0.0), Some(0.0), Some(0.0), Some(0.0), Some(1.0)]
        );
    }

    #[test]
    fn metric_selection() {
        let r = NamedGraph::new("ref", limits_to_growth());
        let opts = CompareOptions {
            metrics: vec![MetricId::M2, MetricId::G4],
            ..Default::default()
        };
        let report = compare(&r, &r, None, &opts).unwrap();
        assert_eq!(report.scores(), vec![(MetricId::M2, 1.0), (MetricId::G4, 1.0)]);
        assert_eq!(report.config_echo.provider_id, None);
        let with_m3 = CompareOptions {
            metrics: vec![MetricId::M3],
            ..Default::default()
        };
        assert!(matches!(
            compare(&r, &r, None, &with_m3),
            Err(PipelineError::Semantic(SemanticError::MissingProvider(_)))
        ));
    }

    #[test]
    fn report_json_round_trip() {
        let r = NamedGraph::new("ref", limits_to_growth());
        let report = compare(&r, &r, Some(&det()), &CompareOptions::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
