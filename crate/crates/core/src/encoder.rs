//! Graph, attributed-graph and hypergraph encodings.
//!
//! Every encoding bundles a size term `s ⊗ p_n` with one bound term per
//! structural element:
//!
//! * graph:          `(s⊗p_n) ⊕ ⊕_{(i,j)∈E} p_i⊗p_j`
//! * attributed:     graph terms `⊕ ⊕_{i∈V} p_i⊗a_i`
//! * hyper (keyed):  `(s⊗p_n) ⊕ ⊕_k e_k ⊗ (⊕_{j∈E_k} p_j)`
//! * hyper (product): `(s⊗p_n) ⊕ ⊕_{E_k} ⊗_{j∈E_k} p_j`
//!
//! Terms are summed in a fixed canonical order with pairwise accumulation,
//! so an encoding is bit-reproducible regardless of input edge order.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::codebook::{Codebook, Reader};
use crate::error::{Error, Result};
use crate::graph::{neighborhood_subgraph, AttributedGraph, Graph, HyperGraph};
use crate::vsa::{bundle_all, HyperVector, Spectrum};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"HDEM";
pub const EMBEDDING_VERSION: u16 = 1;

/// Hyperedges larger than this trigger a stability warning in product mode.
pub const PRODUCT_STABLE_MEMBERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
#[repr(u16)]
pub enum Mode {
    Graph = 0,
    Attributed = 1,
    HyperProduct = 2,
    HyperKeyed = 3,
    Neighborhood = 4,
    KvBundle = 5,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Graph => "graph",
            Mode::Attributed => "attributed",
            Mode::HyperProduct => "hyper_product",
            Mode::HyperKeyed => "hyper_keyed",
            Mode::Neighborhood => "neighborhood",
            Mode::KvBundle => "kv_bundle",
        }
    }

    fn from_code(code: u16) -> Option<Self> {
        Some(match code {
            0 => Mode::Graph,
            1 => Mode::Attributed,
            2 => Mode::HyperProduct,
            3 => Mode::HyperKeyed,
            4 => Mode::Neighborhood,
            5 => Mode::KvBundle,
            _ => return None,
        })
    }
}

/// An encoded structure together with what is needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub vector: HyperVector,
    pub mode: Mode,
    /// Vertex count carried by the size term.
    pub n_declared: usize,
    pub codebook_fingerprint: u64,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// `magic | version u16 | mode u16 | d u64 | n_declared u64 |
    /// fingerprint u64 | d x f64`, little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 8 * self.dim());
        out.extend_from_slice(EMBEDDING_MAGIC);
        out.extend_from_slice(&EMBEDDING_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.mode as u16).to_le_bytes());
        out.extend_from_slice(&(self.dim() as u64).to_le_bytes());
        out.extend_from_slice(&(self.n_declared as u64).to_le_bytes());
        out.extend_from_slice(&self.codebook_fingerprint.to_le_bytes());
        for x in self.vector.as_slice() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != EMBEDDING_MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u16()?;
        if version != EMBEDDING_VERSION {
            return Err(Error::VersionMismatch(version));
        }
        let code = r.u16()?;
        let mode = Mode::from_code(code).ok_or_else(|| Error::Malformed {
            line: 0,
            reason: format!("unknown embedding mode {code}"),
        })?;
        let d = r.usize()?;
        let n_declared = r.usize()?;
        let codebook_fingerprint = r.u64()?;
        let len = d
            .checked_mul(8)
            .ok_or_else(|| Error::invalid("dimension overflow"))?;
        let payload = r.take(len)?;
        if r.pos != bytes.len() {
            return Err(Error::Malformed {
                line: 0,
                reason: format!("{} trailing bytes", bytes.len() - r.pos),
            });
        }
        let data = payload
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(Self {
            vector: HyperVector::new(data)?,
            mode,
            n_declared,
            codebook_fingerprint,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Lazily computed node-vector spectra for one encoding call.
struct NodeSpectra<'a> {
    cb: &'a Codebook,
    cache: Vec<Option<Spectrum>>,
}

impl<'a> NodeSpectra<'a> {
    fn new(cb: &'a Codebook, n: usize) -> Result<Self> {
        if n > cb.max_nodes() {
            return Err(Error::CapacityExceeded {
                role: "node",
                requested: n,
                available: cb.max_nodes(),
            });
        }
        Ok(Self {
            cb,
            cache: vec![None; n + 1],
        })
    }

    fn get(&mut self, v: usize) -> Result<&Spectrum> {
        if self.cache[v].is_none() {
            self.cache[v] = Some(self.cb.node(v)?.spectrum());
        }
        Ok(self.cache[v].as_ref().unwrap())
    }

    fn bind_pair(&mut self, i: usize, j: usize) -> Result<HyperVector> {
        let a = self.get(i)?.clone();
        Ok(a.mul(self.get(j)?).to_vector())
    }
}

fn size_term(cb: &Codebook, n: usize) -> Result<HyperVector> {
    if n == 0 {
        return Err(Error::invalid(
            "cannot encode a structure with zero vertices",
        ));
    }
    cb.size_vector().bind(cb.node(n)?)
}

fn embedding(cb: &Codebook, terms: &[HyperVector], mode: Mode, n: usize) -> Result<Embedding> {
    Ok(Embedding {
        vector: bundle_all(terms)?,
        mode,
        n_declared: n,
        codebook_fingerprint: cb.fingerprint(),
    })
}

fn graph_terms(g: &Graph, cb: &Codebook, size_n: usize) -> Result<Vec<HyperVector>> {
    let mut spectra = NodeSpectra::new(cb, g.n())?;
    let mut terms = Vec::with_capacity(1 + g.edge_count());
    terms.push(size_term(cb, size_n)?);
    for (i, j) in g.edges() {
        terms.push(spectra.bind_pair(i, j)?);
    }
    Ok(terms)
}

pub fn encode_graph(g: &Graph, cb: &Codebook) -> Result<Embedding> {
    let terms = graph_terms(g, cb, g.n())?;
    embedding(cb, &terms, Mode::Graph, g.n())
}

pub fn encode_attributed(g: &AttributedGraph, cb: &Codebook) -> Result<Embedding> {
    let graph = g.graph();
    let mut terms = graph_terms(graph, cb, graph.n())?;
    for (v, key) in (1..=graph.n()).zip(g.attrs()) {
        terms.push(cb.node(v)?.bind(cb.attribute(key)?)?);
    }
    embedding(cb, &terms, Mode::Attributed, graph.n())
}

/// Indices (1-based) of hyperedges too large for stable product binding.
pub fn product_stability_warnings(h: &HyperGraph) -> Vec<usize> {
    h.hyperedges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.len() > PRODUCT_STABLE_MEMBERS)
        .map(|(k, _)| k + 1)
        .collect()
}

/// Each hyperedge becomes the bind of all its members. Hyperedges are
/// summed in sorted member order, so a hypergraph of 2-member edges encodes
/// bit-identically to the corresponding graph.
pub fn encode_hypergraph_product(h: &HyperGraph, cb: &Codebook) -> Result<Embedding> {
    let unstable = product_stability_warnings(h);
    if !unstable.is_empty() {
        log::warn!(
            "product encoding of hyperedges {unstable:?} binds more than {PRODUCT_STABLE_MEMBERS} vectors and may be unstable"
        );
    }
    let mut spectra = NodeSpectra::new(cb, h.n())?;
    let mut edges: Vec<&Vec<usize>> = h.hyperedges().iter().collect();
    edges.sort();
    let mut terms = Vec::with_capacity(1 + edges.len());
    terms.push(size_term(cb, h.n())?);
    for members in edges {
        let mut acc = spectra.get(members[0])?.clone();
        for &v in &members[1..] {
            acc = acc.mul(spectra.get(v)?);
        }
        terms.push(acc.to_vector());
    }
    embedding(cb, &terms, Mode::HyperProduct, h.n())
}

/// Keyed hypergraph encoding: hyperedge `k` binds its id vector `e_k` with
/// the bundle of its members.
pub fn encode_hypergraph(h: &HyperGraph, cb: &Codebook) -> Result<Embedding> {
    if h.n() > cb.max_nodes() {
        return Err(Error::CapacityExceeded {
            role: "node",
            requested: h.n(),
            available: cb.max_nodes(),
        });
    }
    if h.edge_count() > cb.max_edge_ids() {
        return Err(Error::CapacityExceeded {
            role: "edge-id",
            requested: h.edge_count(),
            available: cb.max_edge_ids(),
        });
    }
    let mut terms = Vec::with_capacity(1 + h.edge_count());
    terms.push(size_term(cb, h.n())?);
    for (k, members) in h.hyperedges().iter().enumerate() {
        let nodes = members
            .iter()
            .map(|&v| cb.node(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        terms.push(cb.edge_id(k + 1)?.bind(&bundle_all(&nodes)?)?);
    }
    embedding(cb, &terms, Mode::HyperKeyed, h.n())
}

/// How a neighborhood subgraph names its vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodLabels {
    /// Keep the parent graph's vertex ids.
    #[default]
    Global,
    /// Renumber the members `1..=k` in label order.
    Relabeled,
}

pub fn encode_node_neighborhood(g: &Graph, v: usize, cb: &Codebook) -> Result<Embedding> {
    encode_node_neighborhood_with(g, v, cb, NeighborhoodLabels::Global)
}

/// Encodes the subgraph induced by `v` and its neighbors. The size term
/// always carries the member count `k`.
pub fn encode_node_neighborhood_with(
    g: &Graph,
    v: usize,
    cb: &Codebook,
    labels: NeighborhoodLabels,
) -> Result<Embedding> {
    let hood = neighborhood_subgraph(g, v)?;
    let k = hood.vertex_count();
    let terms = match labels {
        NeighborhoodLabels::Global => graph_terms(&hood.graph, cb, k)?,
        NeighborhoodLabels::Relabeled => graph_terms(&hood.relabeled(), cb, k)?,
    };
    embedding(cb, &terms, Mode::Neighborhood, k)
}

/// `u = ⊕ k_i ⊗ v_i`.
pub fn encode_kv_pairs(pairs: &[(HyperVector, HyperVector)]) -> Result<HyperVector> {
    if pairs.is_empty() {
        return Err(Error::invalid("key-value bundle needs at least one pair"));
    }
    let terms = pairs
        .iter()
        .map(|(k, v)| k.bind(v))
        .collect::<Result<Vec<_>>>()?;
    bundle_all(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::build_codebook;
    use crate::graph::{gen_star, parse_hypergraph_json_str};

    fn cb(d: usize) -> Codebook {
        build_codebook(d, 1, 16, 8)
            .unwrap()
            .with_generated_attributes(["ALA", "GLY"])
            .unwrap()
    }

    #[test]
    fn empty_graph_is_the_size_term() {
        let cb = cb(128);
        let emb = encode_graph(&Graph::empty(3), &cb).unwrap();
        assert_eq!(
            emb.vector,
            cb.size_vector().bind(cb.node(3).unwrap()).unwrap()
        );
        assert_eq!(emb.mode, Mode::Graph);
        assert_eq!(emb.n_declared, 3);
        assert_eq!(emb.codebook_fingerprint, cb.fingerprint());
    }

    #[test]
    fn single_edge_formula() {
        let cb = cb(128);
        let g = Graph::from_edges(2, [(1, 2)]).unwrap();
        let emb = encode_graph(&g, &cb).unwrap();
        let p = |i| cb.node(i).unwrap();
        let expected = cb
            .size_vector()
            .bind(p(2))
            .unwrap()
            .bundle(&p(1).bind(p(2)).unwrap())
            .unwrap();
        for (a, b) in emb.vector.as_slice().iter().zip(expected.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn capacity_and_zero_vertex_errors() {
        let cb = cb(64);
        assert!(matches!(
            encode_graph(&Graph::empty(17), &cb),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(encode_graph(&Graph::empty(0), &cb).is_err());
        let many = HyperGraph::new(3, vec![vec![1]; 9]).unwrap();
        assert!(matches!(
            encode_hypergraph(&many, &cb),
            Err(Error::CapacityExceeded {
                role: "edge-id",
                ..
            })
        ));
    }

    #[test]
    fn attributed_single_vertex() {
        let cb = cb(128);
        let ag = AttributedGraph::new(Graph::empty(1), vec!["ALA".into()]).unwrap();
        let emb = encode_attributed(&ag, &cb).unwrap();
        let p1 = cb.node(1).unwrap();
        let expected = cb
            .size_vector()
            .bind(p1)
            .unwrap()
            .bundle(&p1.bind(cb.attribute("ALA").unwrap()).unwrap())
            .unwrap();
        assert_eq!(emb.vector, expected);
        let missing = AttributedGraph::new(Graph::empty(1), vec!["TRP".into()]).unwrap();
        assert!(matches!(
            encode_attributed(&missing, &cb),
            Err(Error::UnknownKey(_))
        ));
    }

    #[test]
    fn product_mode_and_warnings() {
        let cb = cb(128);
        let pair = HyperGraph::new(2, vec![vec![1, 2]]).unwrap();
        let prod = encode_hypergraph_product(&pair, &cb).unwrap();
        let graph = encode_graph(&Graph::from_edges(2, [(1, 2)]).unwrap(), &cb).unwrap();
        assert_eq!(prod.vector, graph.vector);
        assert_eq!(prod.mode, Mode::HyperProduct);

        let big = HyperGraph::new(6, vec![vec![1, 2], vec![1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(product_stability_warnings(&big), vec![2]);
        let none = HyperGraph::new(3, vec![]).unwrap();
        assert_eq!(
            encode_hypergraph_product(&none, &cb).unwrap().vector,
            cb.size_vector().bind(cb.node(3).unwrap()).unwrap()
        );
    }

    #[test]
    fn keyed_hypergraph_formula() {
        let cb = cb(64);
        let h = parse_hypergraph_json_str(r#"{"n":4,"hyperedges":[[2,3],[4]]}"#).unwrap();
        let emb = encode_hypergraph(&h, &cb).unwrap();
        let p = |i| cb.node(i).unwrap().clone();
        let e1 = cb
            .edge_id(1)
            .unwrap()
            .bind(&p(2).bundle(&p(3)).unwrap())
            .unwrap();
        let e2 = cb.edge_id(2).unwrap().bind(&p(4)).unwrap();
        let expected = bundle_all(&[cb.size_vector().bind(&p(4)).unwrap(), e1, e2]).unwrap();
        assert_eq!(emb.vector, expected);
        assert_eq!(emb.mode, Mode::HyperKeyed);
        let bare = HyperGraph::new(9, vec![]).unwrap();
        assert_eq!(
            encode_hypergraph(&bare, &cb).unwrap().vector,
            cb.size_vector().bind(cb.node(9).unwrap()).unwrap()
        );
    }

    #[test]
    fn neighborhoods() {
        let cb = cb(128);
        let star = gen_star(5);
        let center = encode_node_neighborhood(&star, 1, &cb).unwrap();
        assert_eq!(center.vector, encode_graph(&star, &cb).unwrap().vector);
        assert_eq!(center.mode, Mode::Neighborhood);

        let leaf = encode_node_neighborhood(&star, 3, &cb).unwrap();
        let p = |i| cb.node(i).unwrap();
        let direct = bundle_all(&[
            cb.size_vector().bind(p(2)).unwrap(),
            p(1).bind(p(3)).unwrap(),
        ])
        .unwrap();
        assert_eq!(leaf.vector, direct);
        assert_eq!(leaf.n_declared, 2);

        let relabeled =
            encode_node_neighborhood_with(&star, 3, &cb, NeighborhoodLabels::Relabeled).unwrap();
        let two = encode_graph(&Graph::from_edges(2, [(1, 2)]).unwrap(), &cb).unwrap();
        assert_eq!(relabeled.vector, two.vector);

        let iso = encode_node_neighborhood(&Graph::empty(4), 4, &cb).unwrap();
        assert_eq!(iso.vector, cb.size_vector().bind(p(1)).unwrap());
        assert!(encode_node_neighborhood(&star, 6, &cb).is_err());
    }

    #[test]
    fn kv_pairs() {
        let cb = cb(64);
        let (k, v) = (cb.node(1).unwrap().clone(), cb.node(2).unwrap().clone());
        assert_eq!(
            encode_kv_pairs(&[(k.clone(), v.clone())]).unwrap(),
            k.bind(&v).unwrap()
        );
        assert!(encode_kv_pairs(&[]).is_err());
        let short = HyperVector::identity(8).unwrap();
        assert!(matches!(
            encode_kv_pairs(&[(k, short)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn embedding_bytes() {
        let cb = cb(32);
        let emb = encode_graph(&gen_star(4), &cb).unwrap();
        let bytes = emb.to_bytes();
        assert_eq!(bytes.len(), 32 + 32 * 8);
        assert_eq!(Embedding::from_bytes(&bytes).unwrap(), emb);
        assert!(matches!(
            Embedding::from_bytes(&bytes[..40]),
            Err(Error::Truncated { .. })
        ));
        let mut bad = bytes.clone();
        bad[6] = 77;
        assert!(Embedding::from_bytes(&bad).is_err());
        let mut magic = bytes;
        magic[1] = b'?';
        assert!(matches!(
            Embedding::from_bytes(&magic),
            Err(Error::BadMagic)
        ));
    }
}
