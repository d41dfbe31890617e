//! Holographic reduced representations of graphs and hypergraphs.
//!
//! A graph becomes a single real vector built from circular-convolution
//! binding and addition over a seeded codebook of node, edge-identity, size
//! and attribute vectors. The decoder reads edges, size and attributes back
//! out by approximate unbinding. Alongside sit a dense spectral diagnostic
//! (incidence, Laplacian, Dirac operator) and linear/MLP probes for graph
//! properties.
//!
//! ```
//! use hdgraph::{build_codebook, encode_graph, reconstruct_graph, Graph, ReconstructOptions};
//!
//! let cb = build_codebook(4096, 7, 64, 0)?;
//! let g = Graph::from_edges(4, [(1, 2), (2, 3), (3, 4)])?;
//! let emb = encode_graph(&g, &cb)?;
//! let report = reconstruct_graph(&emb, &cb, ReconstructOptions::default())?;
//! assert_eq!(report.to_graph()?, g);
//! # Ok::<(), hdgraph::Error>(())
//! ```

pub mod codebook;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod graph;
pub mod probe;
pub mod rng;
pub mod spectral;
pub mod vsa;

pub use codebook::{build_codebook, Codebook, CodebookSpec};
pub use decoder::{
    capacity_sweep, edge_score, reconstruct_graph, recover_size, CapacityConfig, DecodingReport,
    ReconstructOptions, Threshold,
};
pub use encoder::{
    encode_attributed, encode_graph, encode_hypergraph, encode_hypergraph_product, encode_kv_pairs,
    encode_node_neighborhood, Embedding, Mode,
};
pub use error::{Error, Result};
pub use graph::{AttributedGraph, Graph, HyperGraph};
pub use spectral::SpectralBundle;
pub use vsa::{bind, bundle, cosine, identity, inverse, random_hypervector, HyperVector};
