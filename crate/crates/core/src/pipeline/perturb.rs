use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::graph::{to_json, CausalGraph, EdgeRecord, NodeRecord, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbKind {
    RenameNode,
    DeleteNode,
    AddNode,
    DeleteEdge,
    AddEdge,
    FlipPolarity,
    ReverseEdge,
}

impl PerturbKind {
    pub const ALL: [PerturbKind; 7] = [
        PerturbKind::RenameNode,
        PerturbKind::DeleteNode,
        PerturbKind::AddNode,
        PerturbKind::DeleteEdge,
        PerturbKind::AddEdge,
        PerturbKind::FlipPolarity,
        PerturbKind::ReverseEdge,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PerturbKind::RenameNode => "rename_node",
            PerturbKind::DeleteNode => "delete_node",
            PerturbKind::AddNode => "add_node",
            PerturbKind::DeleteEdge => "delete_edge",
            PerturbKind::AddEdge => "add_edge",
            PerturbKind::FlipPolarity => "flip_polarity",
            PerturbKind::ReverseEdge => "reverse_edge",
        }
    }
}

impl fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PerturbKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PerturbKind::ALL
            .into_iter()
            .find(|k| k.id() == s.trim())
            .ok_or_else(|| format!("unknown perturbation {s:?}"))
    }
}

pub const DEFAULT_MAX_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationPlan {
    pub seed: u64,
    /// Number of operations of each kind applied to every output graph.
    pub ops: BTreeMap<PerturbKind, usize>,
    /// `add_node` is skipped once a graph has this many nodes.
    pub max_nodes: usize,
}

impl PerturbationPlan {
    pub fn new(seed: u64) -> Self {
        PerturbationPlan {
            seed,
            ops: BTreeMap::new(),
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn with(mut self, kind: PerturbKind, count: usize) -> Self {
        *self.ops.entry(kind).or_insert(0) += count;
        self
    }

    /// Parses `kind=count` pairs, e.g. `rename_node=2,delete_edge=1`.
    /// An empty string is the zero-op plan.
    pub fn parse_ops(seed: u64, spec: &str) -> Result<Self, PipelineError> {
        let mut plan = PerturbationPlan::new(seed);
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (kind, count) = part.split_once('=').unwrap_or((part, "1"));
            let kind: PerturbKind = kind.parse().map_err(PipelineError::InvalidPlan)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| PipelineError::InvalidPlan(format!("bad count in {part:?}")))?;
            plan = plan.with(kind, count);
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.max_nodes == 0 {
            return Err(PipelineError::InvalidPlan("max_nodes must be >= 1".into()));
        }
        Ok(())
    }

    pub fn op_count(&self) -> usize {
        self.ops.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedOp {
    pub kind: PerturbKind,
    pub skipped: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub ops: Vec<AppliedOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub plan: PerturbationPlan,
    pub graphs: Vec<ManifestEntry>,
}

const SYNONYMS: &[&[&str]] = &[
    &["population", "inhabitants", "residents", "people"],
    &["increase", "growth", "rise", "gain"],
    &["decrease", "decline", "drop", "loss"],
    &["net", "overall", "total"],
    &["carrying", "supporting", "sustaining"],
    &["capacity", "capability", "limit"],
    &["resources", "assets", "supplies"],
    &["per", "for each"],
    &["capita", "person", "head"],
    &["rate", "speed", "pace"],
    &["demand", "need", "requirement"],
    &["student", "pupil", "learner"],
    &["enrollment", "registration", "admissions"],
    &["cost", "expense", "price"],
    &["quality", "standard", "grade"],
    &["school", "academy", "college"],
    &["birth", "fertility"],
    &["death", "mortality"],
    &["food", "nutrition"],
    &["pollution", "contamination"],
];

const VOCABULARY: &[&str] = &[
    "birth rate",
    "death rate",
    "food supply",
    "industrial output",
    "pollution",
    "land yield",
    "investment",
    "labor force",
    "service output",
    "energy use",
    "water stock",
    "public health",
];

fn synonym(token: &str, rng: &mut ChaCha8Rng) -> Option<String> {
    let group = SYNONYMS.iter().find(|g| g.contains(&token))?;
    let others: Vec<&str> = group.iter().copied().filter(|w| *w != token).collect();
    others.choose(rng).map(|w| (*w).to_owned())
}

fn gibberish(rng: &mut ChaCha8Rng) -> String {
    // leading "zq" keeps generated words disjoint from real vocabulary
    let len = rng.random_range(3..=6);
    let mut w = String::from("zq");
    for _ in 0..len {
        w.push(rng.random_range(b'a'..=b'z') as char);
    }
    w
}

/// Mutable working copy; converted back to a validated graph at the end.
struct Draft {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    next_id: usize,
}

impl Draft {
    fn fresh_id(&mut self) -> String {
        loop {
            let id = format!("N{}", self.next_id);
            self.next_id += 1;
            if !self.nodes.iter().any(|n| n.id == id) {
                return id;
            }
        }
    }

    fn has_edge(&self, src: &str, dst: &str) -> bool {
        self.edges.iter().any(|e| e.src == src && e.dst == dst)
    }

    fn apply(&mut self, kind: PerturbKind, max_nodes: usize, rng: &mut ChaCha8Rng) -> Result<String, String> {
        match kind {
            PerturbKind::RenameNode => {
                let i = rng.random_range(0..self.nodes.len().max(1));
                let node = self.nodes.get_mut(i).ok_or("graph has no nodes")?;
                let mut tokens: Vec<String> = node.name.split(' ').map(str::to_owned).collect();
                let t = rng.random_range(0..tokens.len());
                if let Some(s) = synonym(&tokens[t], rng) {
                    tokens[t] = s;
                } else if tokens.len() > 1 && rng.random_bool(0.5) {
                    let u = (t + 1) % tokens.len();
                    tokens.swap(t, u);
                } else {
                    tokens[t] = gibberish(rng);
                }
                let old = std::mem::replace(&mut node.name, tokens.join(" "));
                Ok(format!("{}: {old:?} -> {:?}", node.id, node.name))
            }
            PerturbKind::DeleteNode => {
                if self.nodes.len() <= 1 {
                    return Err("graph would become empty".into());
                }
                let removed = self.nodes.remove(rng.random_range(0..self.nodes.len()));
                self.edges.retain(|e| e.src != removed.id && e.dst != removed.id);
                Ok(format!("{} {:?}", removed.id, removed.name))
            }
            PerturbKind::AddNode => {
                if self.nodes.len() >= max_nodes {
                    return Err(format!("graph already has {max_nodes} nodes"));
                }
                let id = self.fresh_id();
                let name = (*VOCABULARY.choose(rng).expect("vocabulary")).to_owned();
                let mut detail = format!("{id} {name:?}");
                if !self.nodes.is_empty() {
                    let other = self.nodes[rng.random_range(0..self.nodes.len())].id.clone();
                    let polarity = random_polarity(rng);
                    let (src, dst) = if rng.random_bool(0.5) {
                        (id.clone(), other)
                    } else {
                        (other, id.clone())
                    };
                    detail += &format!(" linked {src} -> {dst} ({polarity})");
                    self.edges.push(EdgeRecord { src, dst, polarity });
                }
                self.nodes.push(NodeRecord { id, name });
                Ok(detail)
            }
            PerturbKind::DeleteEdge => {
                if self.edges.is_empty() {
                    return Err("graph has no edges".into());
                }
                let e = self.edges.remove(rng.random_range(0..self.edges.len()));
                Ok(format!("{} -> {}", e.src, e.dst))
            }
            PerturbKind::AddEdge => {
                let candidates: Vec<(usize, usize)> = (0..self.nodes.len())
                    .flat_map(|u| (0..self.nodes.len()).map(move |v| (u, v)))
                    .filter(|&(u, v)| u != v && !self.has_edge(&self.nodes[u].id, &self.nodes[v].id))
                    .collect();
                let &(u, v) = candidates.choose(rng).ok_or("graph is complete")?;
                let e = EdgeRecord {
                    src: self.nodes[u].id.clone(),
                    dst: self.nodes[v].id.clone(),
                    polarity: random_polarity(rng),
                };
                let detail = format!("{} -> {} ({})", e.src, e.dst, e.polarity);
                self.edges.push(e);
                Ok(detail)
            }
            PerturbKind::FlipPolarity => {
                if self.edges.is_empty() {
                    return Err("graph has no edges".into());
                }
                let i = rng.random_range(0..self.edges.len());
                let e = &mut self.edges[i];
                e.polarity = e.polarity.flipped();
                Ok(format!("{} -> {} now {}", e.src, e.dst, e.polarity))
            }
            PerturbKind::ReverseEdge => {
                let candidates: Vec<usize> = (0..self.edges.len())
                    .filter(|&i| !self.has_edge(&self.edges[i].dst, &self.edges[i].src))
                    .collect();
                let &i = candidates.choose(rng).ok_or("no edge can be reversed")?;
                let e = &mut self.edges[i];
                std::mem::swap(&mut e.src, &mut e.dst);
                Ok(format!("now {} -> {}", e.src, e.dst))
            }
        }
    }
}

fn random_polarity(rng: &mut ChaCha8Rng) -> Polarity {
    if rng.random_bool(0.5) {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Applies every operation of `plan` to a copy of `g` in a random order.
/// Operations that would break validity are recorded as skipped.
pub fn perturb_graph(
    g: &CausalGraph,
    plan: &PerturbationPlan,
    rng: &mut ChaCha8Rng,
) -> (CausalGraph, Vec<AppliedOp>) {
    let mut ops: Vec<PerturbKind> = plan
        .ops
        .iter()
        .flat_map(|(&k, &c)| std::iter::repeat_n(k, c))
        .collect();
    ops.shuffle(rng);
    let mut draft = Draft {
        nodes: g.nodes().to_vec(),
        edges: g.edges().to_vec(),
        next_id: 0,
    };
    let applied = ops
        .into_iter()
        .map(|kind| match draft.apply(kind, plan.max_nodes, rng) {
            Ok(detail) => AppliedOp {
                kind,
                skipped: false,
                detail,
            },
            Err(why) => AppliedOp {
                kind,
                skipped: true,
                detail: why,
            },
        })
        .collect();
    let graph = CausalGraph::new(draft.nodes, draft.edges)
        .expect("perturbations preserve graph validity");
    (graph, applied)
}

/// Replaces every node name with fresh tokens sharing nothing with the
/// original vocabulary; structure and polarity are untouched.
pub fn rename_all(g: &CausalGraph, seed: u64) -> CausalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let original: BTreeSet<&str> = g
        .nodes()
        .iter()
        .flat_map(|n| n.name.split(' '))
        .collect();
    let mut used = BTreeSet::new();
    g.with_names(|_| loop {
        let name = gibberish(&mut rng);
        if !original.contains(name.as_str()) && used.insert(name.clone()) {
            return name;
        }
    })
    .expect("generated names are canonical")
}

/// Writes `n` perturbed copies of `reference` as `s{seed}-{i:05}.json` plus
/// `s{seed}.manifest.json` into `out_dir`. Graph `i` uses its own ChaCha
/// stream, so output depends only on the seed, the plan and `i`.
pub fn perturb_corpus(
    reference: &CausalGraph,
    plan: &PerturbationPlan,
    n: usize,
    out_dir: &Path,
) -> Result<CorpusManifest, PipelineError> {
    plan.validate()?;
    if n == 0 {
        return Err(PipelineError::InvalidPlan("n must be >= 1".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;
    let mut graphs = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        rng.set_stream(i as u64);
        let (g, ops) = perturb_graph(reference, plan, &mut rng);
        let file = format!("s{}-{i:05}.json", plan.seed);
        let path = out_dir.join(&file);
        std::fs::write(&path, to_json(&g)).map_err(|e| PipelineError::io(&path, e))?;
        graphs.push(ManifestEntry { file, ops });
    }
    let manifest = CorpusManifest {
        seed: plan.seed,
        plan: plan.clone(),
        graphs,
    };
    let path = out_dir.join(format!("s{}.manifest.json", plan.seed));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| PipelineError::io(&path, e))?;
    Ok(manifest)
}
