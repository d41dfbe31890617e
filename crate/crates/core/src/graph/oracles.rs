//! Exact combinatorial answers used as labels and test oracles.

use std::collections::VecDeque;

use super::Graph;
use crate::error::Result;

/// True if any connected component contains a cycle.
pub fn has_cycle(g: &Graph) -> bool {
    // A forest has exactly n - c edges.
    g.edge_count() + connected_components(g) > g.n()
}

pub fn count_triangles(g: &Graph) -> usize {
    let adj = g.adjacency();
    g.edges()
        .map(|(i, j)| {
            adj[i]
                .iter()
                .filter(|&&k| k > j && g.has_edge(j, k))
                .count()
        })
        .sum()
}

pub fn degree(g: &Graph, v: usize) -> Result<usize> {
    g.check_vertex(v)?;
    Ok(g.edges().filter(|&(i, j)| i == v || j == v).count())
}

/// Number of connected components, counting isolated vertices.
pub fn connected_components(g: &Graph) -> usize {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n() + 1];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 1..=g.n() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    components
}

/// The subgraph induced by a vertex and its neighbors, with original labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: usize,
    /// Sorted original labels of the member vertices.
    pub vertices: Vec<usize>,
    /// Induced edges, still on the parent's vertex set `1..=n`.
    pub graph: Graph,
}

impl Neighborhood {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Same subgraph with members renumbered `1..=k` in label order.
    pub fn relabeled(&self) -> Graph {
        let pos = |v: usize| self.vertices.binary_search(&v).expect("member vertex") + 1;
        Graph::from_edges(
            self.vertices.len(),
            self.graph.edges().map(|(i, j)| (pos(i), pos(j))),
        )
        .expect("relabeling preserves validity")
    }
}

pub fn neighborhood_subgraph(g: &Graph, v: usize) -> Result<Neighborhood> {
    g.check_vertex(v)?;
    let adj = g.adjacency();
    let mut vertices = adj[v].clone();
    vertices.push(v);
    vertices.sort_unstable();
    let member = |x: usize| vertices.binary_search(&x).is_ok();
    let induced = Graph::from_edges(g.n(), g.edges().filter(|&(i, j)| member(i) && member(j)))?;
    Ok(Neighborhood {
        center: v,
        vertices,
        graph: induced,
    })
}
