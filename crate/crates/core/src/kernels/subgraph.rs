use super::{normalize_kernel, KernelConfig, KernelError};
use crate::graph::CausalGraph;

/// Product graph of two causal graphs: vertices pair up equally named nodes,
/// and two pairs are adjacent when their ordered adjacency agrees in both
/// graphs and both directions.
pub(crate) struct ProductGraph {
    pub adj: Vec<Vec<bool>>,
}

pub(crate) fn product_graph(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<ProductGraph, KernelError> {
    let (n1, n2) = (g1.nodes(), g2.nodes());
    let vertices: Vec<(usize, usize)> = (0..n1.len())
        .flat_map(|i| (0..n2.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| n1[i].name == n2[j].name)
        .collect();
    if vertices.len() > cfg.product_graph_cap {
        return Err(KernelError::ProductGraphTooLarge {
            size: vertices.len(),
            cap: cfg.product_graph_cap,
        });
    }
    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let agree = |u: usize, v: usize, x: usize, y: usize| {
        if cfg.use_polarity_in_g2_g3 {
            a1[u][v] == a2[x][y]
        } else {
            a1[u][v].is_some() == a2[x][y].is_some()
        }
    };
    let p = vertices.len();
    let mut adj = vec![vec![false; p]; p];
    for a in 0..p {
        for b in (a + 1)..p {
            let ((u, x), (v, y)) = (vertices[a], vertices[b]);
            if u != v && x != y && agree(u, v, x, y) && agree(v, u, y, x) {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    Ok(ProductGraph { adj })
}

/// Number of cliques of each size `1..=k` (index `s - 1`).
fn clique_counts(adj: &[Vec<bool>], k: usize) -> Vec<u64> {
    fn extend(adj: &[Vec<bool>], candidates: &[usize], size: usize, k: usize, counts: &mut [u64]) {
        for (i, &v) in candidates.iter().enumerate() {
            counts[size] += 1;
            if size + 1 < k {
                let next: Vec<usize> = candidates[i + 1..]
                    .iter()
                    .copied()
                    .filter(|&w| adj[v][w])
                    .collect();
                extend(adj, &next, size + 1, k, counts);
            }
        }
    }
    let mut counts = vec![0u64; k];
    let all: Vec<usize> = (0..adj.len()).collect();
    extend(adj, &all, 0, k, &mut counts);
    counts
}

pub(crate) fn subgraph_raw(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    let k = cfg.subgraph_max_size;
    if !(1..=4).contains(&k) {
        return Err(KernelError::InvalidConfig(format!(
            "subgraph_max_size must be in 1..=4, got {k}"
        )));
    }
    let product = product_graph(g1, g2, cfg)?;
    Ok(clique_counts(&product.adj, k)
        .iter()
        .enumerate()
        .map(|(s, &c)| cfg.clique_weight(s + 1) * c as f64)
        .sum())
}

/// G3: weighted count of cliques up to `subgraph_max_size` in the product
/// graph, i.e. of matched subgraphs with equal names and equal adjacency.
pub fn subgraph_matching_kernel(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    let kxy = subgraph_raw(g1, g2, cfg)?;
    let kxx = subgraph_raw(g1, g1, cfg)?;
    let kyy = subgraph_raw(g2, g2, cfg)?;
    normalize_kernel(kxy, kxx, kyy)
}
