//! Structural graph kernels G1–G5.
//!
//! Each kernel decomposes both graphs into substructures, counts shared ones
//! (the raw kernel) and normalizes with `k(x,y) / sqrt(k(x,x) k(y,y))` so that
//! scores land in `[0, 1]`. Any comparison involving a graph whose self-kernel
//! is zero (in particular an empty graph) scores 0.

mod pyramid;
mod shortest_path;
mod subgraph;
mod wl;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::CausalGraph;

pub use pyramid::{pyramid_match_kernel, vertex_embedding};
pub use shortest_path::shortest_path_kernel;
pub use subgraph::subgraph_matching_kernel;
pub use wl::{wl_edge_histogram, wl_vertex_histogram};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("invalid kernel configuration: {0}")]
    InvalidConfig(String),
    #[error("product graph has {size} vertices, above the cap of {cap}")]
    ProductGraphTooLarge { size: usize, cap: usize },
    #[error("internal error: negative self-kernel {0}")]
    NegativeSelfKernel(f64),
    #[error("gram matrix needs at least one graph")]
    NoGraphs,
}

/// Kernel hyperparameters shared by all five kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    /// WL refinement rounds for G4 and G5.
    pub wl_iterations: usize,
    /// Eigenvector embedding dimension for G1.
    pub pyramid_dims: usize,
    /// Histogram pyramid depth for G1.
    pub pyramid_levels: usize,
    /// Largest clique size counted by G3 (at most 4).
    pub subgraph_max_size: usize,
    /// Weight of a G3 clique by size (`weights[s - 1]`); `None` weighs every
    /// size 1.
    pub subgraph_weights: Option<Vec<f64>>,
    /// Product-graph vertex cap for G3.
    pub product_graph_cap: usize,
    /// Also match edge polarity in G2 and G3.
    pub use_polarity_in_g2_g3: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            wl_iterations: 3,
            pyramid_dims: 6,
            pyramid_levels: 4,
            subgraph_max_size: 3,
            subgraph_weights: None,
            product_graph_cap: 4096,
            use_polarity_in_g2_g3: false,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |m: String| Err(KernelError::InvalidConfig(m));
        if self.pyramid_dims == 0 {
            return bad("pyramid_dims must be >= 1".into());
        }
        if self.pyramid_levels == 0 {
            return bad("pyramid_levels must be >= 1".into());
        }
        if self.pyramid_levels > 30 {
            return bad("pyramid_levels must be <= 30".into());
        }
        if !(1..=4).contains(&self.subgraph_max_size) {
            return bad(format!(
                "subgraph_max_size must be in 1..=4, got {}",
                self.subgraph_max_size
            ));
        }
        if let Some(w) = &self.subgraph_weights {
            if w.len() < self.subgraph_max_size {
                return bad(format!(
                    "subgraph_weights needs {} entries, got {}",
                    self.subgraph_max_size,
                    w.len()
                ));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad("subgraph_weights must be finite and non-negative".into());
            }
        }
        Ok(())
    }

    pub(crate) fn clique_weight(&self, size: usize) -> f64 {
        self.subgraph_weights
            .as_ref()
            .map_or(1.0, |w| w[size - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelId {
    #[serde(rename = "g1")]
    PyramidMatch,
    #[serde(rename = "g2")]
    ShortestPath,
    #[serde(rename = "g3")]
    SubgraphMatching,
    #[serde(rename = "g4")]
    WlVertexHistogram,
    #[serde(rename = "g5")]
    WlEdgeHistogram,
}

impl KernelId {
    pub const ALL: [KernelId; 5] = [
        KernelId::PyramidMatch,
        KernelId::ShortestPath,
        KernelId::SubgraphMatching,
        KernelId::WlVertexHistogram,
        KernelId::WlEdgeHistogram,
    ];

    pub fn id(self) -> &'static str {
        match self {
            KernelId::PyramidMatch => "g1",
            KernelId::ShortestPath => "g2",
            KernelId::SubgraphMatching => "g3",
            KernelId::WlVertexHistogram => "g4",
            KernelId::WlEdgeHistogram => "g5",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelId::PyramidMatch => "pyramid match",
            KernelId::ShortestPath => "shortest path",
            KernelId::SubgraphMatching => "subgraph matching",
            KernelId::WlVertexHistogram => "WL vertex histogram",
            KernelId::WlEdgeHistogram => "WL edge histogram",
        }
    }

    /// Normalized kernel value for one pair.
    pub fn compute(
        self,
        g1: &CausalGraph,
        g2: &CausalGraph,
        cfg: &KernelConfig,
    ) -> Result<f64, KernelError> {
        match self {
            KernelId::PyramidMatch => pyramid_match_kernel(g1, g2, cfg),
            KernelId::ShortestPath => shortest_path_kernel(g1, g2, cfg),
            KernelId::SubgraphMatching => subgraph_matching_kernel(g1, g2, cfg),
            KernelId::WlVertexHistogram => wl_vertex_histogram(g1, g2, cfg),
            KernelId::WlEdgeHistogram => wl_edge_histogram(g1, g2, cfg),
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id().to_uppercase())
    }
}

impl FromStr for KernelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        KernelId::ALL
            .into_iter()
            .find(|k| k.id() == lower)
            .ok_or_else(|| format!("unknown kernel {s:?}"))
    }
}

/// Normalized G1–G5 scores for one graph pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelScores {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub g5: f64,
}

impl KernelScores {
    pub fn get(&self, id: KernelId) -> f64 {
        match id {
            KernelId::PyramidMatch => self.g1,
            KernelId::ShortestPath => self.g2,
            KernelId::SubgraphMatching => self.g3,
            KernelId::WlVertexHistogram => self.g4,
            KernelId::WlEdgeHistogram => self.g5,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.g1, self.g2, self.g3, self.g4, self.g5]
    }
}

/// `kxy / sqrt(kxx kyy)` clamped to `[0, 1]`; 0 when either self-kernel is 0.
pub fn normalize_kernel(kxy: f64, kxx: f64, kyy: f64) -> Result<f64, KernelError> {
    for k in [kxx, kyy] {
        if k < 0.0 || k.is_nan() {
            return Err(KernelError::NegativeSelfKernel(k));
        }
    }
    if kxx == 0.0 || kyy == 0.0 {
        return Ok(0.0);
    }
    Ok((kxy / (kxx * kyy).sqrt()).clamp(0.0, 1.0))
}

pub fn kernel_scores(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<KernelScores, KernelError> {
    cfg.validate()?;
    Ok(KernelScores {
        g1: pyramid_match_kernel(g1, g2, cfg)?,
        g2: shortest_path_kernel(g1, g2, cfg)?,
        g3: subgraph_matching_kernel(g1, g2, cfg)?,
        g4: wl_vertex_histogram(g1, g2, cfg)?,
        g5: wl_edge_histogram(g1, g2, cfg)?,
    })
}

/// Normalized pairwise kernel matrix. The upper triangle is computed (in
/// parallel) and mirrored, so the result is exactly symmetric.
pub fn gram_matrix(
    graphs: &[CausalGraph],
    kernel: KernelId,
    cfg: &KernelConfig,
) -> Result<Vec<Vec<f64>>, KernelError> {
    if graphs.is_empty() {
        return Err(KernelError::NoGraphs);
    }
    cfg.validate()?;
    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| kernel.compute(&graphs[i], &graphs[j], cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gram = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        gram[i][j] = v;
        gram[j][i] = v;
    }
    Ok(gram)
}

/// Sparse count histogram dot product.
pub(crate) fn histogram_dot<K: Ord>(
    a: &std::collections::BTreeMap<K, u64>,
    b: &std::collections::BTreeMap<K, u64>,
) -> u64 {
    a.iter()
        .filter_map(|(k, x)| b.get(k).map(|y| x * y))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Polarity::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_kernel(3.0, 3.0, 3.0).unwrap(), 1.0);
        assert_eq!(normalize_kernel(0.0, 5.0, 7.0).unwrap(), 0.0);
        assert!((normalize_kernel(1.0, 3.0, 1.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(normalize_kernel(1.0, 0.0, 4.0).unwrap(), 0.0);
        assert!(matches!(
            normalize_kernel(1.0, -1.0, 1.0),
            Err(KernelError::NegativeSelfKernel(_))
        ));
        // rounding above 1 is clamped
        assert_eq!(normalize_kernel(3.0000000001, 3.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(KernelConfig::default().validate().is_ok());
        let cfg = KernelConfig {
            subgraph_max_size: 5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = KernelConfig {
            subgraph_weights: Some(vec![1.0, 0.5]),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg: KernelConfig = serde_json::from_str(r#"{"wl_iterations": 1}"#).unwrap();
        assert_eq!(cfg.wl_iterations, 1);
        assert_eq!(cfg.pyramid_dims, 6);
        assert!(serde_json::from_str::<KernelConfig>(r#"{"wl_iteration": 1}"#).is_err());
    }

    #[test]
    fn empty_graph_scores_zero() {
        let g = CausalGraph::builder()
            .node("a", "a")
            .node("b", "b")
            .edge("a", "b", Positive)
            .build()
            .unwrap();
        let s = kernel_scores(&g, &CausalGraph::empty(), &KernelConfig::default()).unwrap();
        assert_eq!(s.as_array(), [0.0; 5]);
        let s = kernel_scores(&g, &g, &KernelConfig::default()).unwrap();
        assert_eq!(s.as_array(), [1.0; 5]);
    }

    #[test]
    fn gram_examples() {
        let g = CausalGraph::builder()
            .node("a", "a")
            .node("b", "b")
            .edge("a", "b", Negative)
            .build()
            .unwrap();
        let cfg = KernelConfig::default();
        for k in KernelId::ALL {
            assert_eq!(gram_matrix(std::slice::from_ref(&g), k, &cfg).unwrap(), vec![vec![1.0]]);
            assert_eq!(
                gram_matrix(&[g.clone(), g.clone()], k, &cfg).unwrap(),
                vec![vec![1.0; 2]; 2]
            );
        }
        assert_eq!(
            gram_matrix(&[], KernelId::ShortestPath, &cfg),
            Err(KernelError::NoGraphs)
        );
    }

    #[test]
    fn kernel_ids_parse() {
        assert_eq!("G3".parse::<KernelId>().unwrap(), KernelId::SubgraphMatching);
        assert!("g6".parse::<KernelId>().is_err());
    }
}
