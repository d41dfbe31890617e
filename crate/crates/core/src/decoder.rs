//! Unbinding queries against encoded structures.
//!
//! An edge `(i, j)` is tested by unbinding `p_i` from the embedding and
//! projecting onto `p_j`:
//!
//! ```text
//! score(i, j) = p_jᵀ (p_i⁻¹ ⊗ g) / ‖p_j‖²
//! ```
//!
//! which concentrates near 1 for present edges and near 0 otherwise. Size is
//! read first (`argmax_i cos(p_i, s⁻¹ ⊗ g)`) so that reconstruction only
//! scores pairs inside the real vertex set.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::codebook::Codebook;
use crate::encoder::{Embedding, Mode};
use crate::error::{Error, Result};
use crate::graph::{Graph, HyperGraph};
use crate::rng::{substream, Role};
use crate::vsa::{bundle_all, dot, HyperVector, Spectrum, DEFAULT_INVERSE_FLOOR};

/// Top-two score gap below which a size estimate is flagged.
pub const SIZE_CONFIDENCE_GAP: f64 = 0.1;
pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.5;

/// Precomputed spectrum of an embedding, for repeated unbinding.
struct Unbinder {
    g: Spectrum,
}

impl Unbinder {
    fn new(v: &HyperVector) -> Self {
        Self { g: v.spectrum() }
    }

    /// `key⁻¹ ⊗ g`, plus whether the inverse hit the spectral floor.
    fn unbind(&self, key: &HyperVector) -> (HyperVector, bool) {
        let (inv, clamped) = key.spectrum().reciprocal(DEFAULT_INVERSE_FLOOR);
        (self.g.mul(&inv).to_vector(), clamped)
    }
}

fn require_mode(emb: &Embedding, allowed: &[Mode], expected: &'static str) -> Result<()> {
    if allowed.contains(&emb.mode) {
        Ok(())
    } else {
        Err(Error::WrongMode {
            expected,
            got: emb.mode.name(),
        })
    }
}

fn require_codebook(emb: &Embedding, cb: &Codebook) -> Result<()> {
    if emb.codebook_fingerprint != cb.fingerprint() {
        return Err(Error::CodebookMismatch {
            embedding: emb.codebook_fingerprint,
            codebook: cb.fingerprint(),
        });
    }
    if emb.dim() != cb.dimension() {
        return Err(Error::DimensionMismatch {
            left: emb.dim(),
            right: cb.dimension(),
        });
    }
    Ok(())
}

const EDGE_MODES: &[Mode] = &[Mode::Graph, Mode::Attributed, Mode::Neighborhood];

fn projection(target: &HyperVector, probe: &HyperVector) -> f64 {
    dot(target.as_slice(), probe.as_slice()) / target.norm_sq()
}

/// Normalized score for the presence of edge `(i, j)`.
pub fn edge_score(emb: &Embedding, i: usize, j: usize, cb: &Codebook) -> Result<f64> {
    require_mode(emb, EDGE_MODES, "graph, attributed or neighborhood")?;
    require_codebook(emb, cb)?;
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    let pj = cb.node(j)?;
    let (probe, _) = Unbinder::new(&emb.vector).unbind(cb.node(i)?);
    Ok(projection(pj, &probe))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeEstimate {
    pub n: usize,
    pub score: f64,
    pub runner_up: f64,
    pub low_confidence: bool,
    /// The size-vector inverse hit the spectral floor.
    pub clamped: bool,
}

pub fn recover_size(emb: &Embedding, cb: &Codebook) -> Result<SizeEstimate> {
    if emb.mode == Mode::KvBundle {
        return Err(Error::WrongMode {
            expected: "an encoding with a size term",
            got: emb.mode.name(),
        });
    }
    require_codebook(emb, cb)?;
    let (probe, clamped) = Unbinder::new(&emb.vector).unbind(cb.size_vector());
    size_from_probe(&probe, cb, clamped)
}

fn size_from_probe(probe: &HyperVector, cb: &Codebook, clamped: bool) -> Result<SizeEstimate> {
    let probe_norm = probe.norm();
    if probe_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (mut best, mut best_score, mut second) = (1, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (idx, p) in cb.nodes().iter().enumerate() {
        let c = dot(p.as_slice(), probe.as_slice()) / (p.norm() * probe_norm);
        if c > best_score {
            second = best_score;
            best_score = c;
            best = idx + 1;
        } else if c > second {
            second = c;
        }
    }
    Ok(SizeEstimate {
        n: best,
        score: best_score,
        runner_up: second,
        low_confidence: best_score - second < SIZE_CONFIDENCE_GAP,
        clamped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeMatch {
    pub key: String,
    pub score: f64,
    /// Score of every candidate, in candidate order.
    pub scores: Vec<(String, f64)>,
}

/// Closed-world attribute readout for vertex `i`.
pub fn recover_attribute<S: AsRef<str>>(
    emb: &Embedding,
    i: usize,
    cb: &Codebook,
    candidates: &[S],
) -> Result<AttributeMatch> {
    require_mode(emb, &[Mode::Attributed], "attributed")?;
    require_codebook(emb, cb)?;
    if candidates.is_empty() {
        return Err(Error::invalid(
            "attribute recovery needs at least one candidate",
        ));
    }
    let (probe, _) = Unbinder::new(&emb.vector).unbind(cb.node(i)?);
    let mut scores = Vec::with_capacity(candidates.len());
    for key in candidates {
        let key = key.as_ref();
        let a = cb.attribute(key)?;
        if a.norm_sq() == 0.0 {
            return Err(Error::ZeroVector);
        }
        scores.push((key.to_owned(), projection(a, &probe)));
    }
    let (key, score) = scores
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("non-empty candidates");
    Ok(AttributeMatch { key, score, scores })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Threshold {
    Fixed(f64),
    /// Split the sorted scores at their largest gap.
    Auto,
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Fixed(DEFAULT_EDGE_THRESHOLD)
    }
}

impl Threshold {
    /// Resolves against a score list. `Auto` needs two scores; with fewer it
    /// falls back to the default fixed threshold.
    pub fn resolve(self, scores: &[f64]) -> f64 {
        match self {
            Threshold::Fixed(t) => t,
            Threshold::Auto => largest_gap_split(scores).unwrap_or(DEFAULT_EDGE_THRESHOLD),
        }
    }
}

/// Midpoint of the widest gap between consecutive sorted values.
pub fn largest_gap_split(values: &[f64]) -> Option<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .max_by(|a, b| (a[1] - a[0]).total_cmp(&(b[1] - b[0])))
        .map(|w| 0.5 * (w[0] + w[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructOptions {
    pub threshold: Threshold,
    /// Restrict scoring to pairs inside the recovered vertex set. Turning
    /// this off scores every pair the codebook can express.
    pub safeguard: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            threshold: Threshold::default(),
            safeguard: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairScore {
    pub i: usize,
    pub j: usize,
    /// `p_jᵀ(p_i⁻¹ ⊗ g) / ‖p_j‖²`.
    pub score: f64,
    /// Plain cosine between `p_i⁻¹ ⊗ g` and `p_j`.
    pub cosine: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodingReport {
    pub recovered_n: usize,
    pub size: SizeEstimate,
    pub scores: Vec<PairScore>,
    pub accepted_edges: BTreeSet<(usize, usize)>,
    pub threshold_used: f64,
    /// One flag per inverse taken: the size vector first, then `p_1, p_2, ..`.
    pub clamping_flags: Vec<bool>,
    pub safeguard: bool,
}

impl DecodingReport {
    /// The reconstructed graph on `1..=recovered_n`.
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.recovered_n, self.accepted_edges.iter().copied())
    }

    /// Smallest score among accepted pairs and largest among rejected ones.
    pub fn margin(&self) -> (Option<f64>, Option<f64>) {
        let fold = |accepted: bool, pick: fn(f64, f64) -> f64| {
            self.scores
                .iter()
                .filter(|s| s.accepted == accepted)
                .map(|s| s.score)
                .reduce(pick)
        };
        (fold(true, f64::min), fold(false, f64::max))
    }

    /// `i,j,score,accepted` rows.
    pub fn scores_csv(&self) -> String {
        let mut out = String::from("i,j,score,accepted\n");
        for s in &self.scores {
            let _ = writeln!(out, "{},{},{},{}", s.i, s.j, s.score, s.accepted);
        }
        out
    }
}

/// Reads size, then scores every candidate pair and thresholds.
pub fn reconstruct_graph(
    emb: &Embedding,
    cb: &Codebook,
    opts: ReconstructOptions,
) -> Result<DecodingReport> {
    require_mode(
        emb,
        &[Mode::Graph, Mode::Neighborhood],
        "graph or neighborhood",
    )?;
    require_codebook(emb, cb)?;
    let unbinder = Unbinder::new(&emb.vector);
    let (size_probe, size_clamped) = unbinder.unbind(cb.size_vector());
    let size = size_from_probe(&size_probe, cb, size_clamped)?;
    let limit = if opts.safeguard {
        size.n
    } else {
        cb.max_nodes()
    };

    let mut clamping_flags = vec![size_clamped];
    let mut scores = Vec::new();
    for i in 1..limit {
        let (probe, clamped) = unbinder.unbind(cb.node(i)?);
        clamping_flags.push(clamped);
        let probe_norm = probe.norm();
        for j in i + 1..=limit {
            let pj = cb.node(j)?;
            let d = dot(pj.as_slice(), probe.as_slice());
            scores.push(PairScore {
                i,
                j,
                score: d / pj.norm_sq(),
                cosine: if probe_norm > 0.0 {
                    d / (pj.norm() * probe_norm)
                } else {
                    0.0
                },
                accepted: false,
            });
        }
    }
    let raw: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let threshold_used = opts.threshold.resolve(&raw);
    let mut accepted_edges = BTreeSet::new();
    for s in &mut scores {
        if s.score >= threshold_used {
            s.accepted = true;
            accepted_edges.insert((s.i, s.j));
        }
    }
    Ok(DecodingReport {
        recovered_n: size.n,
        size,
        scores,
        accepted_edges,
        threshold_used,
        clamping_flags,
        safeguard: opts.safeguard,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperedgeRecovery {
    pub edge_index: usize,
    pub members: Vec<usize>,
    /// Score of `p_j` for `j = 1..=recovered_n`.
    pub scores: Vec<f64>,
    pub recovered_n: usize,
    /// Nothing cleared the threshold, or some score sits within 0.1 of it.
    pub low_confidence: bool,
    pub clamped: bool,
}

/// Unbinds `e_k` and keeps every `p_j` (within the recovered size) whose
/// score reaches `threshold`.
pub fn recover_hyperedge_members(
    emb: &Embedding,
    edge_index: usize,
    cb: &Codebook,
    threshold: f64,
) -> Result<HyperedgeRecovery> {
    require_mode(emb, &[Mode::HyperKeyed], "hyper_keyed")?;
    require_codebook(emb, cb)?;
    let key = cb.edge_id(edge_index)?;
    let unbinder = Unbinder::new(&emb.vector);
    let (size_probe, size_clamped) = unbinder.unbind(cb.size_vector());
    let size = size_from_probe(&size_probe, cb, size_clamped)?;
    edge_members(&unbinder, key, edge_index, size.n, cb, threshold)
}

fn edge_members(
    unbinder: &Unbinder,
    key: &HyperVector,
    edge_index: usize,
    n: usize,
    cb: &Codebook,
    threshold: f64,
) -> Result<HyperedgeRecovery> {
    let (probe, clamped) = unbinder.unbind(key);
    let scores = (1..=n)
        .map(|j| Ok(projection(cb.node(j)?, &probe)))
        .collect::<Result<Vec<_>>>()?;
    let members: Vec<usize> = (1..=n).filter(|&j| scores[j - 1] >= threshold).collect();
    let low_confidence = members.is_empty() || scores.iter().any(|s| (s - threshold).abs() < 0.1);
    Ok(HyperedgeRecovery {
        edge_index,
        members,
        scores,
        recovered_n: n,
        low_confidence,
        clamped,
    })
}

/// Queries every hyperedge id in the codebook and keeps the non-empty ones,
/// in id order.
pub fn reconstruct_hypergraph(
    emb: &Embedding,
    cb: &Codebook,
    threshold: f64,
) -> Result<HyperGraph> {
    require_mode(emb, &[Mode::HyperKeyed], "hyper_keyed")?;
    require_codebook(emb, cb)?;
    let unbinder = Unbinder::new(&emb.vector);
    let (size_probe, clamped) = unbinder.unbind(cb.size_vector());
    let n = size_from_probe(&size_probe, cb, clamped)?.n;
    let mut h = HyperGraph::new(n, Vec::new())?;
    for k in 1..=cb.max_edge_ids() {
        let rec = edge_members(&unbinder, cb.edge_id(k)?, k, n, cb, threshold)?;
        if !rec.members.is_empty() {
            h.push(rec.members)?;
        }
    }
    Ok(h)
}

/// `k⁻¹ ⊗ u`.
pub fn unbind_value(u: &HyperVector, key: &HyperVector) -> Result<HyperVector> {
    key.inverse().bind(u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityConfig {
    pub dimension: usize,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Draw keys and values with unit spectral magnitude.
    pub unitary: bool,
}

impl CapacityConfig {
    pub fn new(dimension: usize, n_values: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            dimension,
            n_values,
            trials,
            seed,
            unitary: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityTrial {
    pub n: usize,
    pub d: usize,
    pub trial: usize,
    pub min_correct_cosine: f64,
    pub mean_correct_cosine: f64,
    /// `-1` when there are no wrong values to compare with (`n = 1`).
    pub max_wrong_cosine: f64,
    pub separation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityRecord {
    pub n: usize,
    pub d: usize,
    pub min_correct_cosine: f64,
    pub mean_correct_cosine: f64,
    pub max_wrong_cosine: f64,
    pub separation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    /// One aggregated record per distinct `n`, sorted by `n`.
    pub records: Vec<CapacityRecord>,
    pub trials: Vec<CapacityTrial>,
}

impl CapacityResult {
    pub fn record(&self, n: usize) -> Option<&CapacityRecord> {
        self.records.iter().find(|r| r.n == n)
    }

    /// `n,d,trial,min_correct_cs,max_wrong_cs,separation` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,d,trial,min_correct_cs,max_wrong_cs,separation\n");
        for t in &self.trials {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                t.n, t.d, t.trial, t.min_correct_cosine, t.max_wrong_cosine, t.separation
            );
        }
        out
    }
}

/// Bundles `n` fresh key/value pairs and recovers every value, for each `n`
/// and trial. Each `(n, trial)` draws from its own substream.
pub fn capacity_sweep(cfg: &CapacityConfig) -> Result<CapacityResult> {
    if cfg.n_values.is_empty() || cfg.n_values.contains(&0) {
        return Err(Error::invalid("n_values must be non-empty and positive"));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut trials = Vec::new();
    let mut records = Vec::new();
    for &n in &ns {
        let start = trials.len();
        for t in 0..cfg.trials {
            trials.push(capacity_trial(cfg, n, t)?);
        }
        let these = &trials[start..];
        let min_correct = these
            .iter()
            .map(|t| t.min_correct_cosine)
            .fold(f64::INFINITY, f64::min);
        let max_wrong = these
            .iter()
            .map(|t| t.max_wrong_cosine)
            .fold(-1.0, f64::max);
        let mean = these.iter().map(|t| t.mean_correct_cosine).sum::<f64>() / these.len() as f64;
        records.push(CapacityRecord {
            n,
            d: cfg.dimension,
            min_correct_cosine: min_correct,
            mean_correct_cosine: mean,
            max_wrong_cosine: max_wrong,
            separation: min_correct > max_wrong,
        });
    }
    Ok(CapacityResult { records, trials })
}

fn capacity_trial(cfg: &CapacityConfig, n: usize, trial: usize) -> Result<CapacityTrial> {
    let d = cfg.dimension;
    let stream = ((n as u64) << 24) | trial as u64;
    let mut rng = substream(cfg.seed, Role::Experiment, stream);
    let mut draw = || -> Result<HyperVector> {
        let v = HyperVector::random(d, &mut rng)?;
        Ok(if cfg.unitary { v.to_unitary() } else { v })
    };
    let mut keys = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        keys.push(draw()?);
        values.push(draw()?);
    }
    let bound = keys
        .iter()
        .zip(&values)
        .map(|(k, v)| k.bind(v))
        .collect::<Result<Vec<_>>>()?;
    let bundle = Unbinder::new(&bundle_all(&bound)?);
    let unit_values: Vec<HyperVector> = values.iter().map(|v| v.scale(1.0 / v.norm())).collect();

    let mut min_correct = f64::INFINITY;
    let mut max_wrong = -1.0f64;
    let mut sum_correct = 0.0;
    for (i, key) in keys.iter().enumerate() {
        let (recovered, _) = bundle.unbind(key);
        let r = recovered.scale(1.0 / recovered.norm());
        for (j, v) in unit_values.iter().enumerate() {
            let c = dot(r.as_slice(), v.as_slice()).clamp(-1.0, 1.0);
            if i == j {
                min_correct = min_correct.min(c);
                sum_correct += c;
            } else {
                max_wrong = max_wrong.max(c);
            }
        }
    }
    Ok(CapacityTrial {
        n,
        d,
        trial,
        min_correct_cosine: min_correct,
        mean_correct_cosine: sum_correct / n as f64,
        max_wrong_cosine: max_wrong,
        separation: min_correct > max_wrong,
    })
}
