//! Seeded graph generators and brute-force oracles shared by the integration
//! tests. Oracles deliberately avoid the library's internals: they enumerate
//! paths, subsets and nested label strings directly.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cldsim::graph::{CausalGraph, EdgeRecord, NodeRecord, Polarity};
use cldsim::kernels::{vertex_embedding, KernelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAME_POOL: &[&str] = &[
    "population",
    "net increase",
    "carrying capacity",
    "resources per capita",
    "birth rate",
    "food supply",
    "pollution",
    "capacity",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph with `n` nodes whose names come from the first `pool` entries
/// of [`NAME_POOL`] (so names may repeat when `pool < n`).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, pool: usize, edge_p: f64) -> CausalGraph {
    let nodes: Vec<NodeRecord> = (0..n)
        .map(|i| NodeRecord {
            id: format!("v{i}"),
            name: NAME_POOL[rng.random_range(0..pool)].to_owned(),
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(edge_p) {
                edges.push(EdgeRecord {
                    src: format!("v{u}"),
                    dst: format!("v{v}"),
                    polarity: if rng.random_bool(0.5) {
                        Polarity::Positive
                    } else {
                        Polarity::Negative
                    },
                });
            }
        }
    }
    CausalGraph::new(nodes, edges).unwrap()
}

/// Random graph with at least one edge and between `lo` and `hi` nodes.
pub fn random_graph_with_edge(rng: &mut ChaCha8Rng, lo: usize, hi: usize, pool: usize) -> CausalGraph {
    loop {
        let n = rng.random_range(lo.max(2)..=hi);
        let g = random_graph(rng, n, pool, 0.35);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

pub fn normalize(kxy: f64, kxx: f64, kyy: f64) -> f64 {
    if kxx == 0.0 || kyy == 0.0 {
        0.0
    } else {
        (kxy / (kxx * kyy).sqrt()).clamp(0.0, 1.0)
    }
}

// ---- string metrics -------------------------------------------------------

/// Full-matrix Wagner–Fischer over chars.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn fuzzy_oracle(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        1.0
    } else {
        1.0 - levenshtein_oracle(a, b) as f64 / longest as f64
    }
}

/// Sentence BLEU written as a product of precisions with n-grams joined into
/// strings and clipping done by explicit counting.
pub fn bleu_oracle(candidate: &[&str], reference: &[&str]) -> f64 {
    let grams = |t: &[&str], n: usize| -> Vec<String> {
        if t.len() < n {
            return Vec::new();
        }
        (0..=t.len() - n).map(|i| t[i..i + n].join("\u{1}")).collect()
    };
    let orders = candidate.len().min(4);
    let mut product = 1.0;
    for n in 1..=orders {
        let c = grams(candidate, n);
        let r = grams(reference, n);
        let mut matched = 0usize;
        let distinct: BTreeSet<&String> = c.iter().collect();
        for g in distinct {
            let in_c = c.iter().filter(|x| *x == g).count();
            let in_r = r.iter().filter(|x| *x == g).count();
            matched += in_c.min(in_r);
        }
        let p = if matched > 0 {
            matched as f64 / c.len() as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (c.len() as f64 + 1.0)
        };
        product *= p;
    }
    let bp = if candidate.len() < reference.len() {
        (1.0 - reference.len() as f64 / candidate.len() as f64).exp()
    } else {
        1.0
    };
    product.powf(1.0 / orders as f64) * bp
}

// ---- G2: shortest-path kernel by path enumeration ------------------------

fn simple_paths(g: &CausalGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut out = Vec::new();
    fn dfs(adj: &[Vec<Option<Polarity>>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let last = *path.last().unwrap();
        for next in 0..adj.len() {
            if adj[last][next].is_some() && !path.contains(&next) {
                path.push(next);
                dfs(adj, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        dfs(&adj, &mut vec![s], &mut out);
    }
    out
}

/// One record per ordered reachable pair: (src name, dst name, hops,
/// first-edge polarity of the canonical shortest path).
fn shortest_path_records(g: &CausalGraph) -> Vec<(String, String, usize, Polarity)> {
    let nodes = g.nodes();
    let adj = g.adjacency();
    let mut best: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for p in simple_paths(g).into_iter().filter(|p| p.len() > 1) {
        let key = (p[0], *p.last().unwrap());
        let entry = best.entry(key).or_default();
        match entry.first().map(|q| q.len()) {
            Some(l) if l < p.len() => {}
            Some(l) if l == p.len() => entry.push(p),
            _ => *entry = vec![p],
        }
    }
    best.into_iter()
        .map(|((u, v), mut paths)| {
            paths.sort_by_key(|p| p[1..p.len() - 1].iter().map(|&i| nodes[i].id.clone()).collect::<Vec<_>>());
            let p = &paths[0];
            (
                nodes[u].name.clone(),
                nodes[v].name.clone(),
                p.len() - 1,
                adj[p[0]][p[1]].unwrap(),
            )
        })
        .collect()
}

pub fn g2_oracle(g1: &CausalGraph, g2: &CausalGraph, polarity: bool) -> f64 {
    let k = |a: &CausalGraph, b: &CausalGraph| {
        let (ra, rb) = (shortest_path_records(a), shortest_path_records(b));
        let mut total = 0.0;
        for x in &ra {
            for y in &rb {
                if x.0 == y.0 && x.1 == y.1 && x.2 == y.2 && (!polarity || x.3 == y.3) {
                    total += 1.0;
                }
            }
        }
        total
    };
    normalize(k(g1, g2), k(g1, g1), k(g2, g2))
}

// ---- G3: matched subgraphs by subset enumeration -------------------------

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn injections(targets: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in injections(targets, size - 1) {
        for t in 0..targets {
            if !prefix.contains(&t) {
                let mut p = prefix.clone();
                p.push(t);
                out.push(p);
            }
        }
    }
    out
}

/// Counts pairs (vertex subset of `a`, injective name-preserving map into
/// `b`) whose induced adjacency agrees, weighted by subset size.
fn g3_raw(a: &CausalGraph, b: &CausalGraph, cfg: &KernelConfig) -> f64 {
    let (na, nb) = (a.nodes(), b.nodes());
    let (aa, ab) = (a.adjacency(), b.adjacency());
    let same = |x: Option<Polarity>, y: Option<Polarity>| {
        if cfg.use_polarity_in_g2_g3 {
            x == y
        } else {
            x.is_some() == y.is_some()
        }
    };
    let mut total = 0.0;
    for size in 1..=cfg.subgraph_max_size.min(na.len()) {
        let weight = cfg.subgraph_weights.as_ref().map_or(1.0, |w| w[size - 1]);
        for s in subsets(na.len(), size) {
            for map in injections(nb.len(), size) {
                let names_ok = s.iter().zip(&map).all(|(&u, &x)| na[u].name == nb[x].name);
                let edges_ok = (0..size).all(|i| {
                    (0..size).all(|j| i == j || same(aa[s[i]][s[j]], ab[map[i]][map[j]]))
                });
                if names_ok && edges_ok {
                    total += weight;
                }
            }
        }
    }
    total
}

pub fn g3_oracle(g1: &CausalGraph, g2: &CausalGraph, cfg: &KernelConfig) -> f64 {
    normalize(g3_raw(g1, g2, cfg), g3_raw(g1, g1, cfg), g3_raw(g2, g2, cfg))
}

// ---- G4 / G5: WL with uncompressed nested labels --------------------------

fn nested_labels(g: &CausalGraph, initial: Vec<String>, h: usize) -> Vec<Vec<String>> {
    let edges = g.indexed_edges();
    let mut rounds = vec![initial];
    for _ in 0..h {
        let prev = rounds.last().unwrap();
        let next = (0..g.node_count())
            .map(|v| {
                let mut nb: Vec<String> = Vec::new();
                for &(s, d, _) in &edges {
                    if s == v {
                        nb.push(format!("out:{}", prev[d]));
                    }
                    if d == v {
                        nb.push(format!("in:{}", prev[s]));
                    }
                }
                // "in" sorts before "out", matching any fixed direction order
                nb.sort();
                format!("({}|{})", prev[v], nb.join(","))
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

fn count<T: Ord + Clone>(items: &[T]) -> BTreeMap<T, f64> {
    let mut m = BTreeMap::new();
    for i in items {
        *m.entry(i.clone()).or_insert(0.0) += 1.0;
    }
    m
}

fn dot<T: Ord>(a: &BTreeMap<T, f64>, b: &BTreeMap<T, f64>) -> f64 {
    a.iter().map(|(k, x)| x * b.get(k).copied().unwrap_or(0.0)).sum()
}

pub fn g4_oracle(g1: &CausalGraph, g2: &CausalGraph, h: usize) -> f64 {
    let raw = |a: &CausalGraph, b: &CausalGraph| {
        let (la, lb) = (nested_labels(a, a.names(), h), nested_labels(b, b.names(), h));
        la.iter().zip(&lb).map(|(x, y)| dot(&count(x), &count(y))).sum::<f64>()
    };
    normalize(raw(g1, g2), raw(g1, g1), raw(g2, g2))
}

pub fn g5_oracle(g1: &CausalGraph, g2: &CausalGraph, h: usize) -> f64 {
    let triples = |g: &CausalGraph| -> Vec<Vec<(String, String, Polarity)>> {
        nested_labels(g, vec!["*".to_owned(); g.node_count()], h)
            .into_iter()
            .map(|labels| {
                g.indexed_edges()
                    .into_iter()
                    .map(|(s, d, p)| (labels[s].clone(), labels[d].clone(), p))
                    .collect()
            })
            .collect()
    };
    let raw = |a: &CausalGraph, b: &CausalGraph| {
        triples(a)
            .iter()
            .zip(&triples(b))
            .map(|(x, y)| dot(&count(x), &count(y)))
            .sum::<f64>()
    };
    normalize(raw(g1, g2), raw(g1, g1), raw(g2, g2))
}

// ---- G1: grid histogram intersection --------------------------------------

fn in_cell(x: f64, c: usize, cells: usize) -> bool {
    let lo = c as f64 / cells as f64;
    let hi = (c + 1) as f64 / cells as f64;
    if c + 1 == cells {
        x >= lo && x <= 1.0
    } else {
        x >= lo && x < hi
    }
}

/// Pyramid match over the library's spectral embedding, computed by walking
/// every grid cell and every name at every level.
pub fn g1_oracle(g1: &CausalGraph, g2: &CausalGraph, dims: usize, levels: usize) -> f64 {
    assert_eq!(dims, 2, "oracle walks a 2-d grid");
    let raw = |a: &CausalGraph, b: &CausalGraph| {
        let (ea, eb) = (vertex_embedding(a, dims), vertex_embedding(b, dims));
        let names: BTreeSet<&str> = a.nodes().iter().chain(b.nodes()).map(|n| n.name.as_str()).collect();
        let mut inter = Vec::new();
        for l in 0..levels {
            let cells = 1usize << l;
            let mut total = 0usize;
            for cx in 0..cells {
                for cy in 0..cells {
                    for &name in &names {
                        let hits = |g: &CausalGraph, e: &[Vec<f64>]| {
                            g.nodes()
                                .iter()
                                .zip(e)
                                .filter(|(n, p)| n.name == name && in_cell(p[0], cx, cells) && in_cell(p[1], cy, cells))
                                .count()
                        };
                        total += hits(a, &ea).min(hits(b, &eb));
                    }
                }
            }
            inter.push(total as f64);
        }
        let mut score = inter[levels - 1];
        for l in 0..levels - 1 {
            score += (inter[l] - inter[l + 1]) / 2f64.powi((levels - 1 - l) as i32);
        }
        score
    };
    normalize(raw(g1, g2), raw(g1, g1), raw(g2, g2))
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_extremes(m: &[Vec<f64>]) -> (f64, f64) {
    let n = m.len();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let ev = mat.symmetric_eigenvalues();
    (ev.min(), ev.max())
}
