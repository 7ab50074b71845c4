use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{CausalGraph, GraphError};

pub const DEFAULT_CYCLE_CAP: usize = 10_000;

/// Graph-level characteristics of one causal graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub cycles: usize,
    pub density: f64,
    pub transitivity: f64,
    /// `None` for graphs with fewer than two nodes, where the pair average is
    /// undefined.
    pub avg_connectivity: Option<f64>,
}

/// Directed density `m / (n (n - 1))`; 0 below two nodes.
pub fn density(g: &CausalGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    g.edge_count() as f64 / (n * (n - 1)) as f64
}

/// `3t / a` on the undirected projection, where `t` counts triangles and `a`
/// counts connected triples (pairs of edges sharing a node).
pub fn transitivity(g: &CausalGraph) -> f64 {
    let adj = g.undirected_adjacency();
    let n = adj.len();
    let mut triangles = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            if !adj[a][b] {
                continue;
            }
            triangles += ((b + 1)..n).filter(|&c| adj[a][c] && adj[b][c]).count();
        }
    }
    let triads: usize = adj
        .iter()
        .map(|row| {
            let d = row.iter().filter(|&&x| x).count();
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triads == 0 {
        return 0.0;
    }
    3.0 * triangles as f64 / triads as f64
}

/// Maximum number of internally vertex-disjoint paths between `s` and `t` in
/// an undirected graph, via unit-capacity max-flow on the node-split network.
/// A direct edge counts as one path.
fn local_node_connectivity(adj: &[Vec<bool>], s: usize, t: usize) -> usize {
    let n = adj.len();
    let size = 2 * n;
    let (inp, out) = (|v: usize| 2 * v, |v: usize| 2 * v + 1);
    let mut cap = vec![vec![0i32; size]; size];
    for v in 0..n {
        cap[inp(v)][out(v)] = 1;
        for w in 0..n {
            if adj[v][w] {
                cap[out(v)][inp(w)] = 1;
            }
        }
    }
    let (source, sink) = (out(s), inp(t));
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for y in 0..size {
                if cap[x][y] > 0 && parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        let mut y = sink;
        while y != source {
            let x = parent[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
}

/// Mean local node connectivity over all unordered node pairs of the
/// undirected projection.
pub fn average_connectivity(g: &CausalGraph) -> Result<f64, GraphError> {
    let n = g.node_count();
    if n < 2 {
        return Err(GraphError::UndefinedStatistic {
            statistic: "average connectivity",
            n,
        });
    }
    let adj = g.undirected_adjacency();
    let mut total = 0usize;
    for s in 0..n {
        for t in (s + 1)..n {
            total += local_node_connectivity(&adj, s, t);
        }
    }
    Ok(total as f64 / (n * (n - 1) / 2) as f64)
}

/// Number of simple directed cycles, with the default cap.
pub fn count_cycles(g: &CausalGraph) -> Result<usize, GraphError> {
    count_cycles_capped(g, DEFAULT_CYCLE_CAP)
}

/// Number of simple directed cycles. Each cycle is counted once, rooted at
/// its smallest vertex index. Fails once more than `cap` cycles are found.
pub fn count_cycles_capped(g: &CausalGraph, cap: usize) -> Result<usize, GraphError> {
    let n = g.node_count();
    let mut succ = vec![Vec::new(); n];
    for (u, v, _) in g.indexed_edges() {
        succ[u].push(v);
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
    }

    struct Search<'a> {
        succ: &'a [Vec<usize>],
        on_path: Vec<bool>,
        count: usize,
        cap: usize,
    }

    impl Search<'_> {
        fn walk(&mut self, root: usize, v: usize) -> Result<(), GraphError> {
            for &w in &self.succ[v] {
                if w == root {
                    self.count += 1;
                    if self.count > self.cap {
                        return Err(GraphError::CycleCapExceeded { cap: self.cap });
                    }
                } else if w > root && !self.on_path[w] {
                    self.on_path[w] = true;
                    self.walk(root, w)?;
                    self.on_path[w] = false;
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        succ: &succ,
        on_path: vec![false; n],
        count: 0,
        cap,
    };
    for root in 0..n {
        search.on_path[root] = true;
        search.walk(root, root)?;
        search.on_path[root] = false;
    }
    Ok(search.count)
}

pub fn stats(g: &CausalGraph) -> Result<GraphStats, GraphError> {
    let avg_connectivity = match average_connectivity(g) {
        Ok(v) => Some(v),
        Err(GraphError::UndefinedStatistic { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(GraphStats {
        n: g.node_count(),
        m: g.edge_count(),
        cycles: count_cycles(g)?,
        density: density(g),
        transitivity: transitivity(g),
        avg_connectivity,
    })
}
