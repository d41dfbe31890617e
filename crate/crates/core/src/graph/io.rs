//! Edge-list and JSON file formats.
//!
//! * edge list: first line `n=<int>`, then one `i j` pair per line.
//! * graph JSON: `{"n": int, "edges": [[i, j], ...], "attrs": [key, ...]}`
//!   with `attrs` optional.
//! * hypergraph JSON: `{"n": int, "hyperedges": [[v, ...], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AttributedGraph, Graph, HyperGraph};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    crate::error::read_text(path)
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or(Error::Malformed {
        line: 1,
        reason: "missing \"n=<int>\" header".into(),
    })?;
    let n = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Malformed {
            line,
            reason: format!("expected \"n=<int>\", got {header:?}"),
        })?;
    let mut g = Graph::empty(n);
    for (line, row) in lines {
        let ends: Vec<usize> = row
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Malformed {
                line,
                reason: format!("{e}"),
            })?;
        let [i, j] = ends[..] else {
            return Err(Error::Malformed {
                line,
                reason: format!("expected two vertices, got {}", ends.len()),
            });
        };
        g.add_edge(i, j)?;
    }
    Ok(g)
}

pub fn parse_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list_str(&read(path.as_ref())?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attrs: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HyperGraphDoc {
    n: usize,
    hyperedges: Vec<Vec<usize>>,
}

/// Contents of a graph JSON file; attributes are optional there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub attrs: Option<Vec<String>>,
}

impl GraphFile {
    pub fn into_attributed(self) -> Result<AttributedGraph> {
        let attrs = self
            .attrs
            .ok_or_else(|| Error::invalid("graph file has no \"attrs\" field"))?;
        AttributedGraph::new(self.graph, attrs)
    }
}

pub fn parse_graph_json_str(text: &str) -> Result<GraphFile> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let graph = Graph::from_edges(doc.n, doc.edges.iter().map(|e| (e[0], e[1])))?;
    if let Some(attrs) = &doc.attrs {
        if attrs.len() != graph.n() {
            return Err(Error::AttributeLength {
                got: attrs.len(),
                n: graph.n(),
            });
        }
    }
    Ok(GraphFile {
        graph,
        attrs: doc.attrs,
    })
}

pub fn parse_graph_json(path: impl AsRef<Path>) -> Result<GraphFile> {
    parse_graph_json_str(&read(path.as_ref())?)
}

pub fn write_graph_json(g: &Graph, attrs: Option<&[String]>) -> String {
    let doc = GraphDoc {
        n: g.n(),
        edges: g.edges().map(|(i, j)| [i, j]).collect(),
        attrs: attrs.map(<[String]>::to_vec),
    };
    serde_json::to_string(&doc).expect("graph serializes")
}

pub fn parse_hypergraph_json_str(text: &str) -> Result<HyperGraph> {
    let doc: HyperGraphDoc = serde_json::from_str(text)?;
    HyperGraph::new(doc.n, doc.hyperedges)
}

pub fn parse_hypergraph_json(path: impl AsRef<Path>) -> Result<HyperGraph> {
    parse_hypergraph_json_str(&read(path.as_ref())?)
}

pub fn write_hypergraph_json(h: &HyperGraph) -> String {
    let doc = HyperGraphDoc {
        n: h.n(),
        hyperedges: h.hyperedges().to_vec(),
    };
    serde_json::to_string(&doc).expect("hypergraph serializes")
}
