//! Weisfeiler–Lehman relabeling kernels (G4 on vertex labels, G5 on edge
//! triples).

use std::collections::BTreeMap;

use super::{histogram_dot, normalize_kernel, KernelConfig, KernelError};
use crate::graph::{CausalGraph, Polarity};

const IN: u8 = 0;
const OUT: u8 = 1;

type Signature = (u32, Vec<(u8, u32)>);

/// Per-iteration compressed labels for both graphs, with one dictionary per
/// iteration shared between them. `rounds[i][g][v]` is the label of vertex
/// `v` of graph `g` after `i` refinements.
fn refine(graphs: [&CausalGraph; 2], initial: [Vec<String>; 2], h: usize) -> Vec<[Vec<u32>; 2]> {
    let mut dict: BTreeMap<String, u32> = BTreeMap::new();
    let mut current = initial.map(|labels| {
        labels
            .into_iter()
            .map(|l| {
                let next = dict.len() as u32;
                *dict.entry(l).or_insert(next)
            })
            .collect::<Vec<u32>>()
    });
    let neighborhoods = graphs.map(|g| {
        let mut nb = vec![Vec::new(); g.node_count()];
        for (u, v, _) in g.indexed_edges() {
            nb[u].push((OUT, v));
            nb[v].push((IN, u));
        }
        nb
    });
    let mut rounds = vec![current.clone()];
    for _ in 0..h {
        let mut dict: BTreeMap<Signature, u32> = BTreeMap::new();
        let mut next = [Vec::new(), Vec::new()];
        for gi in 0..2 {
            next[gi] = (0..current[gi].len())
                .map(|v| {
                    let mut multiset: Vec<(u8, u32)> = neighborhoods[gi][v]
                        .iter()
                        .map(|&(dir, w)| (dir, current[gi][w]))
                        .collect();
                    multiset.sort_unstable();
                    let fresh = dict.len() as u32;
                    *dict.entry((current[gi][v], multiset)).or_insert(fresh)
                })
                .collect();
        }
        current = next;
        rounds.push(current.clone());
    }
    rounds
}

fn vertex_histogram(labels: &[u32]) -> BTreeMap<u32, u64> {
    let mut h = BTreeMap::new();
    for &l in labels {
        *h.entry(l).or_insert(0) += 1;
    }
    h
}

fn edge_histogram(g: &CausalGraph, labels: &[u32]) -> BTreeMap<(u32, u32, Polarity), u64> {
    let mut h = BTreeMap::new();
    for (u, v, p) in g.indexed_edges() {
        *h.entry((labels[u], labels[v], p)).or_insert(0) += 1;
    }
    h
}

pub(crate) fn wl_vertex_raw(g1: &CausalGraph, g2: &CausalGraph, h: usize) -> [u64; 3] {
    let rounds = refine([g1, g2], [g1.names(), g2.names()], h);
    let mut k = [0u64; 3];
    for [l1, l2] in &rounds {
        let (h1, h2) = (vertex_histogram(l1), vertex_histogram(l2));
        k[0] += histogram_dot(&h1, &h2);
        k[1] += histogram_dot(&h1, &h1);
        k[2] += histogram_dot(&h2, &h2);
    }
    k
}

pub(crate) fn wl_edge_raw(g1: &CausalGraph, g2: &CausalGraph, h: usize) -> [u64; 3] {
    let constant = |g: &CausalGraph| vec![String::new(); g.node_count()];
    let rounds = refine([g1, g2], [constant(g1), constant(g2)], h);
    let mut k = [0u64; 3];
    for [l1, l2] in &rounds {
        let (h1, h2) = (edge_histogram(g1, l1), edge_histogram(g2, l2));
        k[0] += histogram_dot(&h1, &h2);
        k[1] += histogram_dot(&h1, &h1);
        k[2] += histogram_dot(&h2, &h2);
    }
    k
}

/// G4: WL subtree features over vertex labels seeded with variable names.
/// Edge polarity is ignored.
pub fn wl_vertex_histogram(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    let [kxy, kxx, kyy] = wl_vertex_raw(g1, g2, cfg.wl_iterations);
    normalize_kernel(kxy as f64, kxx as f64, kyy as f64)
}

/// G5: WL refinement from a constant initial label (names are never read);
/// features are `(label(src), label(dst), polarity)` edge triples.
pub fn wl_edge_histogram(
    g1: &CausalGraph,
    g2: &CausalGraph,
    cfg: &KernelConfig,
) -> Result<f64, KernelError> {
    let [kxy, kxx, kyy] = wl_edge_raw(g1, g2, cfg.wl_iterations);
    normalize_kernel(kxy as f64, kxx as f64, kyy as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Polarity::*;

    fn edge(a: &str, b: &str, p: Polarity) -> CausalGraph {
        CausalGraph::builder()
            .node(a, a)
            .node(b, b)
            .edge(a, b, p)
            .build()
            .unwrap()
    }

    #[test]
    fn vertex_hand_example() {
        // iteration 0: {a,b}·{a,c} = 1, selfs 2; iteration 1: no shared signature
        let cfg = KernelConfig {
            wl_iterations: 1,
            ..Default::default()
        };
        let (g1, g2) = (edge("a", "b", Positive), edge("a", "c", Positive));
        assert_eq!(wl_vertex_raw(&g1, &g2, 1), [1, 4, 4]);
        assert_eq!(wl_vertex_histogram(&g1, &g2, &cfg).unwrap(), 0.25);
    }

    #[test]
    fn edge_polarity_only_example() {
        let cfg = KernelConfig {
            wl_iterations: 0,
            ..Default::default()
        };
        let (g1, g2) = (edge("a", "b", Positive), edge("a", "b", Negative));
        assert_eq!(wl_edge_histogram(&g1, &g2, &cfg).unwrap(), 0.0);
        // G4 cannot see the difference
        assert_eq!(wl_vertex_histogram(&g1, &g2, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn edge_kernel_ignores_names() {
        let cfg = KernelConfig::default();
        let (g1, g2) = (edge("a", "b", Positive), edge("x", "y", Positive));
        assert_eq!(wl_edge_histogram(&g1, &g2, &cfg).unwrap(), 1.0);
        assert_eq!(wl_vertex_histogram(&g1, &g2, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn direction_matters_after_refinement() {
        // a->b->c versus a<-b->c: same names, different in/out structure
        let chain = CausalGraph::builder()
            .node("a", "a")
            .node("b", "b")
            .node("c", "c")
            .edge("a", "b", Positive)
            .edge("b", "c", Positive)
            .build()
            .unwrap();
        let fork = CausalGraph::builder()
            .node("a", "a")
            .node("b", "b")
            .node("c", "c")
            .edge("b", "a", Positive)
            .edge("b", "c", Positive)
            .build()
            .unwrap();
        let v = wl_vertex_histogram(&chain, &fork, &KernelConfig::default()).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}
