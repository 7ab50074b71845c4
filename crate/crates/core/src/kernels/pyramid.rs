use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{normalize_kernel, KernelConfig, KernelError};
use crate::graph::CausalGraph;

const EIGEN_TIE: f64 = 1e-9;
const COMPONENT_GRID: f64 = 1e12;

fn grid(x: f64, scale: f64) -> i64 {
    (x * scale).round() as i64
}

/// Embeds each vertex into `[0, 1]^dims` using absolute components of the
/// `dims` eigenvectors of the undirected adjacency matrix with the largest
/// `|eigenvalue|`. Coordinates beyond the node count are zero.
///
/// Eigenpairs are ordered by `|eigenvalue|` (descending, ties within 1e-9),
/// then by the eigenvector itself after flipping its first nonzero component
/// positive. Vertices are laid out sorted by name before decomposition, so
/// storage order does not change the embedding of distinctly named nodes.
pub fn vertex_embedding(g: &CausalGraph, dims: usize) -> Vec<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let nodes = g.nodes();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nodes[a].name.cmp(&nodes[b].name).then(a.cmp(&b)));
    let adj = g.undirected_adjacency();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        if adj[order[i]][order[j]] {
            1.0
        } else {
            0.0
        }
    });
    let eigen = matrix.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eigen.eigenvectors.column(k).iter().copied().collect();
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (eigen.eigenvalues[k].abs(), v)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        grid(*lb, 1.0 / EIGEN_TIE)
            .cmp(&grid(*la, 1.0 / EIGEN_TIE))
            .then_with(|| {
                va.iter()
                    .zip(vb)
                    .map(|(x, y)| grid(*x, COMPONENT_GRID).cmp(&grid(*y, COMPONENT_GRID)))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
    });
    let mut embedding = vec![vec![0.0; dims]; n];
    for (k, (_, v)) in pairs.iter().take(dims).enumerate() {
        for (pos, &node) in order.iter().enumerate() {
            embedding[node][k] = v[pos].abs().clamp(0.0, 1.0);
        }
    }
    embedding
}

/// Cell index of a coordinate when `[0, 1]` is split into `cells` bins; the
/// last bin is closed on the right.
pub(crate) fn cell(x: f64, cells: u32) -> u32 {
    ((x * cells as f64).floor() as u32).min(cells - 1)
}

type Histogram = BTreeMap<(String, Vec<u32>), u64>;

fn pyramid(g: &CausalGraph, cfg: &KernelConfig) -> Vec<Histogram> {
    let embedding = vertex_embedding(g, cfg.pyramid_dims);
    (0..cfg.pyramid_levels)
        .map(|level| {
            let cells = 1u32 << level;
            let mut h = Histogram::new();
            for (node, point) in g.nodes().iter().zip(&embedding) {
                let key = point.iter().map(|&x| cell(x, cells)).collect();
                *h.entry((node.name.clone(), key)).or_insert(0) += 1;
            }
            h
        })
        .collect()
}

fn intersection(a: &Histogram, b: &Histogram) -> u64 {
    a.iter()
        .filter_map(|(k, x)| b.get(k).map(|y| (*x).min(*y)))
        .sum()
}

/// Combines per-level intersections `I_0` (coarsest) .. `I_{L-1}` (finest):
/// matches first found at level `l` are weighted `1 / 2^(L-1-l)`.
pub(crate) fn pyramid_score(intersections: &[u64]) -> f64 {
    let levels = intersections.len();
    let finest = intersections[levels - 1] as f64;
    let coarser: f64 = (0..levels - 1)
        .map(|l| {
            let new_matches = intersections[l] as f64 - intersections[l + 1] as f64;
            new_matches / f64::powi(2.0, (levels - 1 - l) as i32)
        })
        .sum();
    finest + coarser
}

fn raw(a: &[Histogram], b: &[Histogram]) -> f64 {
    let intersections: Vec<u64> = a.iter().zip(b).map(|(x, y)| intersection(x, y)).collect();
    pyramid_score(&intersections)
}

/// G1: labeled pyramid match over spectral vertex embeddings. Only vertices
/// with equal names can match.
pub fn pyramid_match_kernel(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    if cfg.pyramid_levels == 0 || cfg.pyramid_dims == 0 {
        return Err(KernelError::InvalidConfig(
            "pyramid dims and levels must be positive".into(),
        ));
    }
    let (p1, p2) = (pyramid(g1, cfg), pyramid(g2, cfg));
    normalize_kernel(raw(&p1, &p2), raw(&p1, &p1), raw(&p2, &p2))
}
