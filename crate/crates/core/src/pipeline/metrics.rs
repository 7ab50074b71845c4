use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernels::KernelId;
use crate::semantic::SemanticMetric;

/// One of the nine reported scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    M1,
    M2,
    M3,
    M4,
    G1,
    G2,
    G3,
    G4,
    G5,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::M1,
        MetricId::M2,
        MetricId::M3,
        MetricId::M4,
        MetricId::G1,
        MetricId::G2,
        MetricId::G3,
        MetricId::G4,
        MetricId::G5,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MetricId::M1 => "m1",
            MetricId::M2 => "m2",
            MetricId::M3 => "m3",
            MetricId::M4 => "m4",
            MetricId::G1 => "g1",
            MetricId::G2 => "g2",
            MetricId::G3 => "g3",
            MetricId::G4 => "g4",
            MetricId::G5 => "g5",
        }
    }

    pub fn semantic(self) -> Option<SemanticMetric> {
        match self {
            MetricId::M1 => Some(SemanticMetric::Bleu),
            MetricId::M2 => Some(SemanticMetric::Fuzzy),
            MetricId::M3 => Some(SemanticMetric::Cosine),
            MetricId::M4 => Some(SemanticMetric::NegEuclidean),
            _ => None,
        }
    }

    pub fn kernel(self) -> Option<KernelId> {
        match self {
            MetricId::G1 => Some(KernelId::PyramidMatch),
            MetricId::G2 => Some(KernelId::ShortestPath),
            MetricId::G3 => Some(KernelId::SubgraphMatching),
            MetricId::G4 => Some(KernelId::WlVertexHistogram),
            MetricId::G5 => Some(KernelId::WlEdgeHistogram),
            _ => None,
        }
    }

    /// Best attainable value.
    pub fn maximum(self) -> f64 {
        match self {
            MetricId::M4 => 0.0,
            _ => 1.0,
        }
    }

    /// Nominal scale. M4 is unbounded below, so its lower end is `None`.
    pub fn scale(self) -> (Option<f64>, f64) {
        match self {
            MetricId::M3 => (Some(-1.0), 1.0),
            MetricId::M4 => (None, 0.0),
            _ => (Some(0.0), 1.0),
        }
    }

    pub fn in_scale(self, value: f64) -> bool {
        let (lo, hi) = self.scale();
        value.is_finite() && value <= hi && lo.is_none_or(|lo| value >= lo)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        MetricId::ALL
            .into_iter()
            .find(|m| m.id() == lower)
            .ok_or_else(|| format!("unknown metric {s:?} (expected m1..m4 or g1..g5)"))
    }
}

/// Parses a comma-separated metric list such as `m1,m2,g5`, deduplicated and
/// in canonical order.
pub fn parse_metric_list(s: &str) -> Result<Vec<MetricId>, String> {
    let mut out = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<MetricId>, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err("metric list is empty".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_lists() {
        assert_eq!(
            parse_metric_list("g5, M1,m1").unwrap(),
            vec![MetricId::M1, MetricId::G5]
        );
        assert!(parse_metric_list("m5").is_err());
        assert!(parse_metric_list("").is_err());
    }

    #[test]
    fn scales() {
        assert!(MetricId::M4.in_scale(-12.0));
        assert!(!MetricId::M4.in_scale(0.1));
        assert!(MetricId::M3.in_scale(-0.5));
        assert!(!MetricId::G1.in_scale(-0.0001));
        assert!(!MetricId::M2.in_scale(f64::NAN));
    }
}
