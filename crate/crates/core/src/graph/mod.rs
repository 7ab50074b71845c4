//! Causal graph data model.
//!
//! A [`CausalGraph`] is a set of named variables connected by directed,
//! polarity-labeled edges. Graphs are validated on construction and immutable
//! afterwards; node and edge order is storage only and never affects any
//! similarity or statistic computed from the graph.

mod parse;
mod stats;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use parse::{parse_cld_text, parse_json, read_graph_file, to_cld_text, to_json};
pub use stats::{
    average_connectivity, count_cycles, count_cycles_capped, density, stats, transitivity,
    GraphStats, DEFAULT_CYCLE_CAP,
};

/// Errors raised while building, parsing or measuring a graph.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid variable name {raw:?}: empty after canonicalization")]
    InvalidName { raw: String },
    #[error("{location}: malformed JSON: {message}")]
    MalformedJson { location: String, message: String },
    #[error("{location}: unknown polarity {token:?} (expected \"+\" or \"-\")")]
    UnknownPolarity { location: String, token: String },
    #[error("{location}: duplicate node id {id:?}")]
    DuplicateNodeId { location: String, id: String },
    #[error("{location}: edge endpoint {id:?} is not a declared node")]
    DanglingEndpoint { location: String, id: String },
    #[error("{location}: duplicate edge {src:?} -> {dst:?}")]
    DuplicateEdge {
        location: String,
        src: String,
        dst: String,
    },
    #[error("{location}: self-loop on {id:?}")]
    SelfLoop { location: String, id: String },
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node {id:?} relabeled from {first:?} to {second:?}")]
    ConflictingLabel {
        line: usize,
        id: String,
        first: String,
        second: String,
    },
    #[error("{statistic} is undefined for graphs with {n} node(s)")]
    UndefinedStatistic { statistic: &'static str, n: usize },
    #[error("more than {cap} simple cycles; raise the cycle cap to count them")]
    CycleCapExceeded { cap: usize },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Lowercases, trims and collapses internal whitespace runs.
pub fn canonical_name(raw: &str) -> Result<String, GraphError> {
    let name = raw
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ");
    if name.is_empty() {
        return Err(GraphError::InvalidName { raw: raw.to_owned() });
    }
    Ok(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        }
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Polarity::Positive),
            "-" => Ok(Polarity::Negative),
            other => Err(other.to_owned()),
        }
    }
}

impl Serialize for Polarity {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Polarity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        token.parse().map_err(|bad: String| {
            serde::de::Error::custom(format!("unknown polarity {bad:?}"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: String,
    pub dst: String,
    pub polarity: Polarity,
}

/// Non-fatal findings reported by [`CausalGraph::warnings`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationWarning {
    /// Several node ids carry the same canonical name; label-based kernels
    /// cannot tell them apart.
    DuplicateName { name: String, ids: Vec<String> },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::DuplicateName { name, ids } => {
                write!(f, "name {name:?} shared by nodes {}", ids.join(", "))
            }
        }
    }
}

/// A validated causal graph.
///
/// Node ids are unique, edges reference declared nodes, there are no
/// self-loops and at most one edge per ordered pair. Names are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    index: HashMap<String, usize>,
}

impl CausalGraph {
    /// Validates and assembles a graph. Names are canonicalized here, so
    /// callers may pass raw labels.
    pub fn new(nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        let mut canonical = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.into_iter().enumerate() {
            let name = canonical_name(&node.name)?;
            if index.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNodeId {
                    location: format!("nodes[{i}]"),
                    id: node.id,
                });
            }
            canonical.push(NodeRecord { id: node.id, name });
        }
        let mut seen = HashMap::with_capacity(edges.len());
        for (i, edge) in edges.iter().enumerate() {
            let location = format!("edges[{i}]");
            for endpoint in [&edge.src, &edge.dst] {
                if !index.contains_key(endpoint) {
                    return Err(GraphError::DanglingEndpoint {
                        location,
                        id: endpoint.clone(),
                    });
                }
            }
            if edge.src == edge.dst {
                return Err(GraphError::SelfLoop {
                    location,
                    id: edge.src.clone(),
                });
            }
            if seen.insert((edge.src.clone(), edge.dst.clone()), i).is_some() {
                return Err(GraphError::DuplicateEdge {
                    location,
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                });
            }
        }
        Ok(CausalGraph {
            nodes: canonical,
            edges,
            index,
        })
    }

    pub fn empty() -> Self {
        CausalGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of a node id in [`nodes`](Self::nodes).
    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&NodeRecord> {
        self.position(id).map(|i| &self.nodes[i])
    }

    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.name.clone()).collect()
    }

    /// Edges as `(src_index, dst_index, polarity)` triples.
    pub fn indexed_edges(&self) -> Vec<(usize, usize, Polarity)> {
        self.edges
            .iter()
            .map(|e| (self.index[&e.src], self.index[&e.dst], e.polarity))
            .collect()
    }

    /// Dense directed adjacency: `adj[u][v]` holds the polarity of `u -> v`.
    pub fn adjacency(&self) -> Vec<Vec<Option<Polarity>>> {
        let n = self.nodes.len();
        let mut adj = vec![vec![None; n]; n];
        for (u, v, p) in self.indexed_edges() {
            adj[u][v] = Some(p);
        }
        adj
    }

    /// Undirected projection as a boolean matrix: direction collapsed,
    /// reciprocal edges merged.
    pub fn undirected_adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut adj = vec![vec![false; n]; n];
        for (u, v, _) in self.indexed_edges() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    pub fn has_edge(&self, src: &str, dst: &str) -> bool {
        self.edges.iter().any(|e| e.src == src && e.dst == dst)
    }

    pub fn warnings(&self) -> Vec<ValidationWarning> {
        let mut by_name: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for node in &self.nodes {
            by_name.entry(&node.name).or_default().push(node.id.clone());
        }
        by_name
            .into_iter()
            .filter(|(_, ids)| ids.len() > 1)
            .map(|(name, ids)| ValidationWarning::DuplicateName {
                name: name.to_owned(),
                ids,
            })
            .collect()
    }

    /// Copy of the graph with every edge polarity inverted.
    pub fn with_flipped_polarities(&self) -> CausalGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.polarity = e.polarity.flipped();
        }
        g
    }

    /// Copy of the graph with node names replaced through `rename`. Ids and
    /// structure are preserved.
    pub fn with_names<F>(&self, mut rename: F) -> Result<CausalGraph, GraphError>
    where
        F: FnMut(&NodeRecord) -> String,
    {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeRecord {
                id: n.id.clone(),
                name: rename(n),
            })
            .collect();
        CausalGraph::new(nodes, self.edges.clone())
    }
}

/// Incremental construction helper, mostly for tests and examples.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

impl GraphBuilder {
    pub fn node(mut self, id: &str, name: &str) -> Self {
        self.nodes.push(NodeRecord {
            id: id.to_owned(),
            name: name.to_owned(),
        });
        self
    }

    pub fn edge(mut self, src: &str, dst: &str, polarity: Polarity) -> Self {
        self.edges.push(EdgeRecord {
            src: src.to_owned(),
            dst: dst.to_owned(),
            polarity,
        });
        self
    }

    pub fn build(self) -> Result<CausalGraph, GraphError> {
        CausalGraph::new(self.nodes, self.edges)
    }
}
