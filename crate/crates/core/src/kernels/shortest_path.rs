use std::collections::BTreeMap;

use super::{histogram_dot, normalize_kernel, KernelConfig, KernelError};
use crate::graph::{CausalGraph, Polarity};

/// Directed all-pairs hop distances (Floyd–Warshall, unit weights).
pub(crate) fn all_pairs_hops(g: &CausalGraph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut dist = vec![vec![None; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for (u, v, _) in g.indexed_edges() {
        dist[u][v] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = dist[k][j] {
                    let through = ik + kj;
                    if dist[i][j].is_none_or(|d| through < d) {
                        dist[i][j] = Some(through);
                    }
                }
            }
        }
    }
    dist
}

/// Polarity of the first edge on the shortest `u -> v` path whose sequence
/// of intermediate node ids is lexicographically smallest.
fn first_edge_polarity(
    g: &CausalGraph,
    adj: &[Vec<Option<Polarity>>],
    dist: &[Vec<Option<u32>>],
    u: usize,
    v: usize,
) -> Polarity {
    let d = dist[u][v].expect("reachable pair");
    if d == 1 {
        return adj[u][v].expect("direct edge");
    }
    let nodes = g.nodes();
    (0..nodes.len())
        .filter(|&w| w != v && adj[u][w].is_some() && dist[w][v] == Some(d - 1))
        .min_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id))
        .map(|w| adj[u][w].expect("edge to successor"))
        .expect("a shortest path has a first hop")
}

type PathFeature = (String, String, u32, Option<Polarity>);

fn path_features(g: &CausalGraph, with_polarity: bool) -> BTreeMap<PathFeature, u64> {
    let dist = all_pairs_hops(g);
    let adj = g.adjacency();
    let nodes = g.nodes();
    let mut features = BTreeMap::new();
    for u in 0..nodes.len() {
        for v in 0..nodes.len() {
            if u == v {
                continue;
            }
            let Some(d) = dist[u][v] else { continue };
            let polarity = with_polarity.then(|| first_edge_polarity(g, &adj, &dist, u, v));
            *features
                .entry((nodes[u].name.clone(), nodes[v].name.clone(), d, polarity))
                .or_insert(0) += 1;
        }
    }
    features
}

pub(crate) fn shortest_path_raw(g1: &CausalGraph, g2: &CausalGraph, cfg: &KernelConfig) -> [u64; 3] {
    let f1 = path_features(g1, cfg.use_polarity_in_g2_g3);
    let f2 = path_features(g2, cfg.use_polarity_in_g2_g3);
    [
        histogram_dot(&f1, &f2),
        histogram_dot(&f1, &f1),
        histogram_dot(&f2, &f2),
    ]
}

/// G2: counts pairs of finite shortest paths with equal length and equal
/// endpoint names.
pub fn shortest_path_kernel(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    let [kxy, kxx, kyy] = shortest_path_raw(g1, g2, cfg);
    normalize_kernel(kxy as f64, kxx as f64, kyy as f64)
}
