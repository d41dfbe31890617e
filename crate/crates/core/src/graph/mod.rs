//! Graphs, attributed graphs and hypergraphs, plus generators, file formats
//! and exact combinatorial oracles.
//!
//! Vertices are 1-based. Edges are undirected and stored canonically as
//! `(i, j)` with `i < j`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub mod generators;
pub mod io;
pub mod oracles;

pub use generators::*;
pub use io::*;
pub use oracles::*;

/// A simple undirected graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        let e = (i.min(j), i.max(j));
        if !self.edges.insert(e) {
            return Err(Error::DuplicateEdge(e.0, e.1));
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges in sorted order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Neighbor lists indexed by vertex (index 0 unused).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for (i, j) in self.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// A graph with one attribute key per vertex (`attrs[v - 1]` belongs to `v`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedGraph {
    graph: Graph,
    attrs: Vec<String>,
}

impl AttributedGraph {
    pub fn new(graph: Graph, attrs: Vec<String>) -> Result<Self> {
        if attrs.len() != graph.n() {
            return Err(Error::AttributeLength {
                got: attrs.len(),
                n: graph.n(),
            });
        }
        Ok(Self { graph, attrs })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn attrs(&self) -> &[String] {
        &self.attrs
    }

    pub fn attr(&self, v: usize) -> Result<&str> {
        self.graph.check_vertex(v)?;
        Ok(&self.attrs[v - 1])
    }
}

/// Hypergraph with an ordered list of hyperedges. Members of each hyperedge
/// are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HyperGraph {
    n: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl HyperGraph {
    pub fn new(n: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mut h = Self {
            n,
            hyperedges: Vec::with_capacity(hyperedges.len()),
        };
        for members in hyperedges {
            h.push(members)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, mut members: Vec<usize>) -> Result<()> {
        let edge = self.hyperedges.len() + 1;
        if members.is_empty() {
            return Err(Error::EmptyHyperedge(edge));
        }
        members.sort_unstable();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateMember { edge, vertex: w[0] });
            }
        }
        for &v in &members {
            if v == 0 || v > self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
        }
        self.hyperedges.push(members);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn edge_count(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn max_edge_size(&self) -> usize {
        self.hyperedges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The graph obtained when every hyperedge has exactly two members.
    pub fn as_graph(&self) -> Option<Graph> {
        if self.hyperedges.iter().any(|e| e.len() != 2) {
            return None;
        }
        Graph::from_edges(self.n, self.hyperedges.iter().map(|e| (e[0], e[1]))).ok()
    }
}
