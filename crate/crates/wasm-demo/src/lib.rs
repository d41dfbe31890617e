//! Browser bindings for a three-panel demo: the key/value capacity curve,
//! pairwise edge scores of a decoded graph, and the Laplacian spectrum with
//! its Dirac check.
//!
//! Every export takes plain strings and numbers and returns JSON text, so the
//! page needs no generated TypeScript types. The `*_json` functions carry the
//! logic and are tested natively.

use hdgraph::codebook::CodebookSpec;
use hdgraph::decoder::{
    capacity_sweep, reconstruct_graph, CapacityConfig, ReconstructOptions, Threshold,
};
use hdgraph::encoder::encode_graph;
use hdgraph::graph::parse_edge_list_str;
use hdgraph::spectral::SpectralBundle;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Capacity of a key/value bundle for each `n` in the comma list.
pub fn capacity_json(d: usize, n_values: &str, trials: usize, seed: u64) -> Result<String, String> {
    let n_values = n_values
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad n {s:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let result = capacity_sweep(&CapacityConfig::new(d, n_values, trials, seed))
        .map_err(|e| e.to_string())?;
    Ok(json!({ "d": d, "trials": trials, "records": result.records }).to_string())
}

/// Encodes an edge list at dimension `d`, decodes it, and returns every pair
/// score alongside the true edge set.
pub fn reconstruct_json(
    edge_list: &str,
    d: usize,
    seed: u64,
    threshold: f64,
) -> Result<String, String> {
    let g = parse_edge_list_str(edge_list).map_err(|e| e.to_string())?;
    let cb = CodebookSpec::new(d, seed)
        .nodes(g.n().max(1) + 8)
        .edge_ids(0)
        .build()
        .map_err(|e| e.to_string())?;
    let emb = encode_graph(&g, &cb).map_err(|e| e.to_string())?;
    let opts = ReconstructOptions {
        threshold: Threshold::Fixed(threshold),
        safeguard: true,
    };
    let report = reconstruct_graph(&emb, &cb, opts).map_err(|e| e.to_string())?;
    let truth: Vec<(usize, usize)> = g.edges().collect();
    let exact = report.recovered_n == g.n()
        && report
            .accepted_edges
            .iter()
            .copied()
            .eq(truth.iter().copied());
    Ok(json!({
        "n": g.n(),
        "recovered_n": report.recovered_n,
        "size_score": report.size.score,
        "threshold": report.threshold_used,
        "exact": exact,
        "truth": truth,
        "scores": report.scores,
    })
    .to_string())
}

/// Laplacian eigenvalues and the Dirac consistency check of an edge list.
pub fn spectrum_json(edge_list: &str) -> Result<String, String> {
    let g = parse_edge_list_str(edge_list).map_err(|e| e.to_string())?;
    let bundle = SpectralBundle::new(&g).map_err(|e| e.to_string())?;
    Ok(json!({
        "eigenvalues": bundle.eigenvalues.as_slice(),
        "check": bundle.check(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn capacity(d: usize, n_values: &str, trials: usize, seed: u64) -> Result<String, JsError> {
    capacity_json(d, n_values, trials, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reconstruct(
    edge_list: &str,
    d: usize,
    seed: u64,
    threshold: f64,
) -> Result<String, JsError> {
    reconstruct_json(edge_list, d, seed, threshold).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(edge_list: &str) -> Result<String, JsError> {
    spectrum_json(edge_list).map_err(|e| JsError::new(&e))
}
