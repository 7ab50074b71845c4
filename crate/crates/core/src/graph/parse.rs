use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{canonical_name, CausalGraph, EdgeRecord, GraphError, NodeRecord, Polarity};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    nodes: Vec<RawNode>,
    #[serde(default)]
    edges: Vec<RawEdge>,
}

#[derive(Deserialize)]
struct RawNode {
    id: String,
    name: String,
}

#[derive(Deserialize)]
struct RawEdge {
    src: String,
    dst: String,
    polarity: String,
}

#[derive(Serialize)]
struct GraphOut<'a> {
    nodes: &'a [NodeRecord],
    edges: &'a [EdgeRecord],
}

/// Parses the JSON graph format
/// `{"nodes":[{"id","name"}...],"edges":[{"src","dst","polarity"}...]}`.
pub fn parse_json(bytes: &[u8]) -> Result<CausalGraph, GraphError> {
    let raw: RawGraph = serde_json::from_slice(bytes).map_err(|e| GraphError::MalformedJson {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let nodes = raw
        .nodes
        .into_iter()
        .map(|n| NodeRecord {
            id: n.id,
            name: n.name,
        })
        .collect();
    let edges = raw
        .edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let polarity =
                e.polarity
                    .parse()
                    .map_err(|token| GraphError::UnknownPolarity {
                        location: format!("edges[{i}]"),
                        token,
                    })?;
            Ok(EdgeRecord {
                src: e.src,
                dst: e.dst,
                polarity,
            })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    CausalGraph::new(nodes, edges)
}

/// Serializes to the JSON graph format (pretty-printed, trailing newline).
pub fn to_json(g: &CausalGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphOut {
        nodes: g.nodes(),
        edges: g.edges(),
    })
    .expect("graph serialization is infallible");
    s.push('\n');
    s
}

fn header_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(graph|flowchart)(\s+(TD|TB|BT|LR|RL))?$").unwrap())
}

fn edge_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r#"^(?P<src>[A-Za-z_][A-Za-z0-9_]*)(?:\[(?P<src_label>[^\]]*)\])?\s*--\s*"(?P<sign>[^"]*)"\s*-->\s*(?P<dst>[A-Za-z_][A-Za-z0-9_]*)(?:\[(?P<dst_label>[^\]]*)\])?$"#,
        )
        .unwrap()
    })
}

fn node_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?P<id>[A-Za-z_][A-Za-z0-9_]*)\[(?P<label>[^\]]*)\]$").unwrap())
}

#[derive(Default)]
struct TextGraph {
    nodes: Vec<NodeRecord>,
    labels: HashMap<String, String>,
    edges: Vec<EdgeRecord>,
    pairs: HashSet<(String, String)>,
}

impl TextGraph {
    fn mention(&mut self, line: usize, id: &str, label: Option<&str>) -> Result<(), GraphError> {
        match (self.labels.get(id), label) {
            (Some(first), Some(raw)) => {
                let second = canonical_name(raw)?;
                if *first != second {
                    return Err(GraphError::ConflictingLabel {
                        line,
                        id: id.to_owned(),
                        first: first.clone(),
                        second,
                    });
                }
            }
            (Some(_), None) => {}
            (None, Some(raw)) => {
                let name = canonical_name(raw)?;
                self.labels.insert(id.to_owned(), name.clone());
                self.nodes.push(NodeRecord {
                    id: id.to_owned(),
                    name,
                });
            }
            (None, None) => {
                return Err(GraphError::Syntax {
                    line,
                    message: format!("node {id:?} is used before its label is declared"),
                })
            }
        }
        Ok(())
    }
}

/// Parses mermaid-style causal loop diagram text.
///
/// ```text
/// graph TD
/// SE[Student Enrollment] -- "+" --> SC[School Capacity Strain]
/// SC -- "-" --> SE
/// ```
///
/// The header line is optional. A bare `ID[Label]` line declares an isolated
/// node. Lines starting with `#` or `%%` are comments.
pub fn parse_cld_text(text: &str) -> Result<CausalGraph, GraphError> {
    let mut g = TextGraph::default();
    let mut seen_content = false;
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("%%") {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        if header_re().is_match(line) {
            if first {
                continue;
            }
            return Err(GraphError::Syntax {
                line: line_no,
                message: "graph header must be the first line".into(),
            });
        }
        if let Some(caps) = edge_re().captures(line) {
            let src = &caps["src"];
            let dst = &caps["dst"];
            let sign = &caps["sign"];
            let polarity: Polarity =
                sign.parse()
                    .map_err(|token| GraphError::UnknownPolarity {
                        location: format!("line {line_no}"),
                        token,
                    })?;
            g.mention(line_no, src, caps.name("src_label").map(|m| m.as_str()))?;
            g.mention(line_no, dst, caps.name("dst_label").map(|m| m.as_str()))?;
            let location = format!("line {line_no}");
            if src == dst {
                return Err(GraphError::SelfLoop {
                    location,
                    id: src.to_owned(),
                });
            }
            if !g.pairs.insert((src.to_owned(), dst.to_owned())) {
                return Err(GraphError::DuplicateEdge {
                    location,
                    src: src.to_owned(),
                    dst: dst.to_owned(),
                });
            }
            g.edges.push(EdgeRecord {
                src: src.to_owned(),
                dst: dst.to_owned(),
                polarity,
            });
        } else if let Some(caps) = node_re().captures(line) {
            g.mention(line_no, &caps["id"], Some(&caps["label"]))?;
        } else {
            return Err(GraphError::Syntax {
                line: line_no,
                message: format!("expected `ID[Label] -- \"+\" --> ID[Label]`, got {line:?}"),
            });
        }
    }
    CausalGraph::new(g.nodes, g.edges)
}

/// Renders a graph in the mermaid-style text format. Fails when an id is not
/// a plain identifier or a name contains `]`.
pub fn to_cld_text(g: &CausalGraph) -> Result<String, GraphError> {
    let id_re = Regex::new(r"^[A-Za-z_][A-Za-z0-9_]*$").unwrap();
    for n in g.nodes() {
        if !id_re.is_match(&n.id) || n.name.contains(']') {
            return Err(GraphError::Syntax {
                line: 0,
                message: format!("node {:?} cannot be written as CLD text", n.id),
            });
        }
    }
    let mut out = String::from("graph TD\n");
    let mut declared = HashSet::new();
    let mut mention = |id: &str, out: &mut String| {
        out.push_str(id);
        if declared.insert(id.to_owned()) {
            let name = &g.node(id).expect("validated endpoint").name;
            out.push('[');
            out.push_str(name);
            out.push(']');
        }
    };
    for e in g.edges() {
        mention(&e.src, &mut out);
        out.push_str(&format!(" -- \"{}\" --> ", e.polarity));
        mention(&e.dst, &mut out);
        out.push('\n');
    }
    for n in g.nodes() {
        if !declared.contains(&n.id) {
            out.push_str(&format!("{}[{}]\n", n.id, n.name));
        }
    }
    Ok(out)
}

/// Reads a graph file, choosing the format from the extension (`.json`) or,
/// failing that, from the first non-blank character.
pub fn read_graph_file(path: &Path) -> Result<CausalGraph, GraphError> {
    let bytes = std::fs::read(path).map_err(|e| GraphError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let is_json = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => true,
        _ => bytes
            .iter()
            .find(|b| !b.is_ascii_whitespace())
            .is_some_and(|&b| b == b'{'),
    };
    if is_json {
        parse_json(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        parse_cld_text(&text)
    }
}
