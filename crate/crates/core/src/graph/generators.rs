//! Seeded synthetic graph and hypergraph families.
//!
//! The `*_with` variants draw from a caller-supplied RNG; the plain ones seed
//! a ChaCha20 stream from `seed` and are pure functions of their arguments.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{Graph, HyperGraph};
use crate::error::{Error, Result};
use crate::rng::{substream, Role};

// Stream indices, one per generator, so equal seeds still give unrelated draws.
const ER: u64 = 0x4552;
const BA: u64 = 0x4241;
const SBM: u64 = 0x5342;
const HYPER_ER: u64 = 0x4845;
const CHUNG_LU: u64 = 0x434c;

fn stream(seed: u64, tag: u64) -> ChaCha20Rng {
    substream(seed, Role::Experiment, tag)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {p} is not a probability")))
    }
}

pub fn gen_complete(n: usize) -> Graph {
    let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
    Graph::from_edges(n, edges).expect("complete graph is simple")
}

pub fn gen_path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i, i + 1))).expect("path is simple")
}

/// Star with center 1.
pub fn gen_star(n: usize) -> Graph {
    Graph::from_edges(n, (2..=n).map(|j| (1, j))).expect("star is simple")
}

/// G(n, p).
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    gen_er_with(n, p, &mut stream(seed, ER))
}

pub fn gen_er_with<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_prob("p", p)?;
    let mut g = Graph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random_bool(p) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Barabási–Albert preferential attachment. Starts from a clique on `m + 1`
/// vertices; every later vertex attaches to `m` distinct earlier ones with
/// probability proportional to degree.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    gen_ba_with(n, m, &mut stream(seed, BA))
}

pub fn gen_ba_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    if m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "BA needs 1 <= m < n, got m={m}, n={n}"
        )));
    }
    let mut g = Graph::empty(n);
    // Each vertex appears once per incident edge end.
    let mut ends = Vec::new();
    for i in 1..=m + 1 {
        for j in i + 1..=m + 1 {
            g.add_edge(i, j)?;
            ends.extend([i, j]);
        }
    }
    for v in m + 2..=n {
        let mut targets = Vec::with_capacity(m);
        while targets.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            g.add_edge(v, t)?;
            ends.extend([v, t]);
        }
    }
    Ok(g)
}

/// Stochastic block model. Blocks occupy consecutive vertex ranges.
pub fn gen_sbm(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    gen_sbm_with(sizes, p_in, p_out, &mut stream(seed, SBM))
}

pub fn gen_sbm_with<R: Rng + ?Sized>(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Result<Graph> {
    check_prob("p_in", p_in)?;
    check_prob("p_out", p_out)?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::invalid("SBM block sizes must be positive"));
    }
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    let mut g = Graph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let p = if block[i - 1] == block[j - 1] {
                p_in
            } else {
                p_out
            };
            if rng.random_bool(p) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// `m` hyperedges; each includes every vertex independently with
/// probability `k_mean / n`. Empty draws are rejected and redrawn.
pub fn gen_hyper_er(n: usize, m: usize, k_mean: f64, seed: u64) -> Result<HyperGraph> {
    gen_hyper_er_with(n, m, k_mean, &mut stream(seed, HYPER_ER))
}

pub fn gen_hyper_er_with<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k_mean: f64,
    rng: &mut R,
) -> Result<HyperGraph> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("hyper-ER needs n >= 1 and m >= 1"));
    }
    if !(k_mean > 0.0 && k_mean <= n as f64) {
        return Err(Error::invalid(format!(
            "k_mean = {k_mean} must lie in (0, n]"
        )));
    }
    let probs = vec![k_mean / n as f64; n];
    sample_memberships(n, m, &probs, rng)
}

/// Chung–Lu style hypergraph with `m` hyperedges: vertex `v` joins each
/// hyperedge with probability `min(1, w_v / m)`, so its expected degree is
/// its weight whenever `w_v <= m`.
pub fn gen_chung_lu(n: usize, degrees: &[f64], m: usize, seed: u64) -> Result<HyperGraph> {
    gen_chung_lu_with(n, degrees, m, &mut stream(seed, CHUNG_LU))
}

pub fn gen_chung_lu_with<R: Rng + ?Sized>(
    n: usize,
    degrees: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<HyperGraph> {
    if degrees.len() != n {
        return Err(Error::invalid(format!(
            "degree sequence has {} entries for {n} vertices",
            degrees.len()
        )));
    }
    if m == 0 {
        return Err(Error::invalid("Chung-Lu needs m >= 1"));
    }
    if degrees.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::invalid("degrees must be finite and nonnegative"));
    }
    if degrees.iter().all(|&w| w == 0.0) {
        return Err(Error::invalid(
            "degenerate degree sequence: all weights are zero",
        ));
    }
    let probs: Vec<f64> = degrees.iter().map(|&w| (w / m as f64).min(1.0)).collect();
    sample_memberships(n, m, &probs, rng)
}

fn sample_memberships<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    probs: &[f64],
    rng: &mut R,
) -> Result<HyperGraph> {
    let mut h = HyperGraph::new(n, Vec::new())?;
    for _ in 0..m {
        let members = loop {
            let members: Vec<usize> = (1..=n).filter(|&v| rng.random_bool(probs[v - 1])).collect();
            if !members.is_empty() {
                break members;
            }
        };
        h.push(members)?;
    }
    Ok(h)
}
