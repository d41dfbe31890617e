//! Downstream readouts on graph embeddings: labeled dataset generation,
//! closed-form ridge heads and a small one-hidden-layer network.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::codebook::{build_codebook, Codebook};
use crate::encoder::{encode_graph, encode_node_neighborhood};
use crate::error::{Error, Result};
use crate::graph::{
    count_triangles, degree, gen_ba_with, gen_complete, gen_er_with, gen_path, gen_sbm_with,
    gen_star, has_cycle, Graph,
};
use crate::rng::{substream, Role};

mod mlp;
mod ridge;

pub use mlp::{mlp_fit, Mlp, MlpConfig};
pub use ridge::{ridge_fit, ridge_fit_cv, ridge_predict, RidgeModel, DEFAULT_LAMBDA_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    NumNodes,
    NumEdges,
    HasCycle,
    NumTriangles,
    NodeDegree,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::NumNodes,
        Task::NumEdges,
        Task::HasCycle,
        Task::NumTriangles,
        Task::NodeDegree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::NumNodes => "num_nodes",
            Task::NumEdges => "num_edges",
            Task::HasCycle => "has_cycle",
            Task::NumTriangles => "num_triangles",
            Task::NodeDegree => "node_degree",
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, Task::HasCycle)
    }

    pub fn metric_name(self) -> &'static str {
        if self.is_classification() {
            "accuracy"
        } else {
            "mse"
        }
    }

    /// The family used when the caller does not pick one.
    pub fn default_family(self) -> GraphFamily {
        let p = match self {
            Task::HasCycle => EdgeProbability::CycleBalanced,
            _ => EdgeProbability::Uniform { lo: 0.1, hi: 0.5 },
        };
        GraphFamily::ErdosRenyi {
            n_min: 5,
            n_max: 15,
            p,
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown task {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EdgeProbability {
    Fixed(f64),
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Per-`n` probability at which a cycle is exactly as likely as not.
    CycleBalanced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GraphFamily {
    ErdosRenyi {
        n_min: usize,
        n_max: usize,
        p: EdgeProbability,
    },
    /// Equal mix of ER, BA, SBM, star, path and complete graphs.
    Mixed { n_min: usize, n_max: usize },
}

impl GraphFamily {
    pub fn max_vertices(&self) -> usize {
        match *self {
            GraphFamily::ErdosRenyi { n_max, .. } | GraphFamily::Mixed { n_max, .. } => n_max,
        }
    }

    fn bounds(&self) -> (usize, usize) {
        match *self {
            GraphFamily::ErdosRenyi { n_min, n_max, .. } | GraphFamily::Mixed { n_min, n_max } => {
                (n_min, n_max)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if lo < 2 || lo > hi {
            return Err(Error::invalid(format!(
                "vertex range [{lo}, {hi}] is invalid"
            )));
        }
        if let GraphFamily::ErdosRenyi { p, .. } = self {
            let ok = match *p {
                EdgeProbability::Fixed(p) => (0.0..=1.0).contains(&p),
                EdgeProbability::Uniform { lo, hi } => 0.0 <= lo && lo <= hi && hi <= 1.0,
                EdgeProbability::CycleBalanced => true,
            };
            if !ok {
                return Err(Error::invalid("edge probability outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        let (lo, hi) = self.bounds();
        let n = rng.random_range(lo..=hi);
        match *self {
            GraphFamily::ErdosRenyi { p, .. } => {
                let p = match p {
                    EdgeProbability::Fixed(p) => p,
                    EdgeProbability::Uniform { lo, hi } => rng.random_range(lo..=hi),
                    EdgeProbability::CycleBalanced => cycle_balanced_probability(n),
                };
                gen_er_with(n, p, rng)
            }
            GraphFamily::Mixed { .. } => match rng.random_range(0..6) {
                0 => gen_er_with(n, rng.random_range(0.1..=0.5), rng),
                1 => gen_ba_with(n, rng.random_range(1..=2usize.min(n - 1)), rng),
                2 => {
                    let a = n / 2;
                    gen_sbm_with(&[a, n - a], 0.7, 0.05, rng)
                }
                3 => Ok(gen_star(n)),
                4 => Ok(gen_path(n)),
                _ => Ok(gen_complete(n)),
            },
        }
    }
}

/// Number of labeled forests on `n` vertices with `k` edges, for all `k`.
fn forest_counts(n: usize) -> Vec<f64> {
    // f[m][k]: forests on m labeled vertices with k edges. Split off the tree
    // holding the lowest label: C(m-1, s-1) choices of companions, s^(s-2) trees.
    let binom = |a: usize, b: usize| -> f64 {
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    let trees = |s: usize| -> f64 {
        if s <= 2 {
            1.0
        } else {
            (s as f64).powi(s as i32 - 2)
        }
    };
    let mut f = vec![vec![0.0; n.max(1)]; n + 1];
    f[0][0] = 1.0;
    for m in 1..=n {
        for s in 1..=m {
            let ways = binom(m - 1, s - 1) * trees(s);
            for k in 0..=(m - s) {
                let prev = f[m - s][k];
                if prev != 0.0 && k + s - 1 < f[m].len() {
                    f[m][k + s - 1] += ways * prev;
                }
            }
        }
    }
    f.swap_remove(n)
}

/// Exact probability that `G(n, p)` is a forest.
pub fn forest_probability(n: usize, p: f64) -> f64 {
    let pairs = (n * n.saturating_sub(1) / 2) as i32;
    forest_counts(n)
        .iter()
        .enumerate()
        .map(|(k, &c)| c * p.powi(k as i32) * (1.0 - p).powi(pairs - k as i32))
        .sum()
}

/// Edge probability making `G(n, p)` cyclic with probability 1/2.
pub fn cycle_balanced_probability(n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if forest_probability(n, mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetConfig {
    pub task: Task,
    pub family: GraphFamily,
    pub size: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl DatasetConfig {
    pub fn new(task: Task, size: usize, seed: u64) -> Self {
        Self {
            task,
            family: task.default_family(),
            size,
            seed,
            train_fraction: 0.8,
        }
    }
}

/// Embeddings (one row each) with task targets and a train/test split.
#[derive(Debug, Clone)]
pub struct LabeledEmbeddingSet {
    pub task: Task,
    pub x: DMatrix<f64>,
    /// Regression values, or class labels (`0.0`/`1.0`) for classification.
    pub y: Vec<f64>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl LabeledEmbeddingSet {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn rows(&self, idx: &[usize]) -> DMatrix<f64> {
        self.x.select_rows(idx)
    }

    pub fn targets(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.y[i]).collect()
    }
}

const DATASET_STREAM: u64 = 0xDA7A_0000;
const SPLIT_STREAM: u64 = 0x5B11_7000;

pub fn build_dataset(cfg: &DatasetConfig, cb: &Codebook) -> Result<LabeledEmbeddingSet> {
    if cfg.size == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::invalid("train fraction must lie in (0, 1)"));
    }
    cfg.family.validate()?;
    if cfg.family.max_vertices() > cb.max_nodes() {
        return Err(Error::CapacityExceeded {
            role: "node",
            requested: cfg.family.max_vertices(),
            available: cb.max_nodes(),
        });
    }
    let d = cb.dimension();
    let mut x = DMatrix::zeros(cfg.size, d);
    let mut y = Vec::with_capacity(cfg.size);
    for row in 0..cfg.size {
        let mut rng = substream(cfg.seed, Role::Experiment, DATASET_STREAM + row as u64);
        let g = cfg.family.sample(&mut rng)?;
        let (emb, target) = match cfg.task {
            Task::NodeDegree => {
                let v = rng.random_range(1..=g.n());
                (encode_node_neighborhood(&g, v, cb)?, degree(&g, v)? as f64)
            }
            task => {
                let target = match task {
                    Task::NumNodes => g.n() as f64,
                    Task::NumEdges => g.edge_count() as f64,
                    Task::HasCycle => f64::from(u8::from(has_cycle(&g))),
                    Task::NumTriangles => count_triangles(&g) as f64,
                    Task::NodeDegree => unreachable!(),
                };
                (encode_graph(&g, cb)?, target)
            }
        };
        x.row_mut(row).copy_from_slice(emb.vector.as_slice());
        y.push(target);
    }
    let mut order: Vec<usize> = (0..cfg.size).collect();
    order.shuffle(&mut substream(cfg.seed, Role::Experiment, SPLIT_STREAM));
    let n_train = ((cfg.size as f64 * cfg.train_fraction).round() as usize).clamp(1, cfg.size);
    let test = order.split_off(n_train);
    Ok(LabeledEmbeddingSet {
        task: cfg.task,
        x,
        y,
        train: order,
        test,
    })
}

/// Accuracy for classification, mean squared error otherwise.
pub fn score_predictions(task: Task, predicted: &[f64], actual: &[f64]) -> f64 {
    if predicted.is_empty() {
        return f64::NAN;
    }
    let n = predicted.len() as f64;
    if task.is_classification() {
        predicted.iter().zip(actual).filter(|(p, a)| p == a).count() as f64 / n
    } else {
        predicted
            .iter()
            .zip(actual)
            .map(|(p, a)| (p - a).powi(2))
            .sum::<f64>()
            / n
    }
}

/// One line of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeMetric {
    pub task: Task,
    pub d: usize,
    pub model: String,
    pub params: usize,
    pub metric_name: &'static str,
    pub metric_value: f64,
    pub seed: u64,
}

pub const METRICS_HEADER: &str = "task,d,model,params,metric_name,metric_value,seed";

impl ProbeMetric {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.task.name(),
            self.d,
            self.model,
            self.params,
            self.metric_name,
            self.metric_value,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProbeModel {
    /// Ridge with the penalty chosen on a validation slice of the training split.
    Ridge {
        lambdas: Vec<f64>,
    },
    Mlp(MlpConfig),
}

impl ProbeModel {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeModel::Ridge { .. } => "ridge",
            ProbeModel::Mlp(_) => "mlp",
        }
    }
}

/// Fits on the training split and scores on the test split.
pub fn evaluate(ds: &LabeledEmbeddingSet, model: &ProbeModel, seed: u64) -> Result<ProbeMetric> {
    let test_x = ds.rows(&ds.test);
    let test_y = ds.targets(&ds.test);
    let (predicted, params) = match model {
        ProbeModel::Ridge { lambdas } => {
            let m = ridge_fit_cv(ds, lambdas)?;
            (ridge_predict(&m, &test_x), m.param_count())
        }
        ProbeModel::Mlp(cfg) => {
            let m = mlp_fit(ds, cfg)?;
            (m.predict(&test_x), m.param_count())
        }
    };
    Ok(ProbeMetric {
        task: ds.task,
        d: ds.dim(),
        model: model.name().to_owned(),
        params,
        metric_name: ds.task.metric_name(),
        metric_value: score_predictions(ds.task, &predicted, &test_y),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub metric: ProbeMetric,
    /// Metric relative to the best dimension: `acc / best_acc` or
    /// `best_mse / mse`, so 1 marks the best.
    pub relative: f64,
}

pub const DEFAULT_SWEEP_DIMS: [usize; 5] = [128, 256, 512, 1024, 2048];

/// Runs one task at each dimension with a fresh codebook per dimension.
pub fn dimension_sweep(
    cfg: &DatasetConfig,
    dims: &[usize],
    model: &ProbeModel,
) -> Result<Vec<SweepRow>> {
    let mut metrics = Vec::with_capacity(dims.len());
    for &d in dims {
        let cb = build_codebook(d, cfg.seed, cfg.family.max_vertices().max(1), 0)?;
        let ds = build_dataset(cfg, &cb)?;
        metrics.push(evaluate(&ds, model, cfg.seed)?);
    }
    let classification = cfg.task.is_classification();
    let best = metrics
        .iter()
        .map(|m| m.metric_value)
        .fold(None, |acc: Option<f64>, v| {
            Some(match acc {
                None => v,
                Some(b) if classification => b.max(v),
                Some(b) => b.min(v),
            })
        })
        .unwrap_or(f64::NAN);
    Ok(metrics
        .into_iter()
        .map(|metric| {
            let v = metric.metric_value;
            let relative = if classification { v / best } else { best / v };
            SweepRow { metric, relative }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("task,d,model,metric_name,metric_value,relative_metric\n");
    for r in rows {
        let m = &r.metric;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            m.task.name(),
            m.d,
            m.model,
            m.metric_name,
            m.metric_value,
            r.relative
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_forest_probability(n: usize, p: f64) -> f64 {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let mut total = 0.0;
        for mask in 0u32..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e);
            let g = Graph::from_edges(n, edges).unwrap();
            if !has_cycle(&g) {
                let k = mask.count_ones() as i32;
                total += p.powi(k) * (1.0 - p).powi(pairs.len() as i32 - k);
            }
        }
        total
    }

    #[test]
    fn forest_probability_matches_enumeration() {
        for n in 1..=5 {
            for p in [0.1, 0.35, 0.8] {
                let exact = forest_probability(n, p);
                let brute = brute_force_forest_probability(n, p);
                assert!(
                    (exact - brute).abs() < 1e-12,
                    "n={n} p={p}: {exact} vs {brute}"
                );
            }
        }
        // Known counts: 16 trees on 4 labeled vertices, 125 on 5.
        assert_eq!(forest_counts(4)[3], 16.0);
        assert_eq!(forest_counts(5)[4], 125.0);
    }

    #[test]
    fn cycle_balanced_dataset_is_balanced() {
        let cb = build_codebook(64, 2, 16, 0).unwrap();
        let ds = build_dataset(&DatasetConfig::new(Task::HasCycle, 1000, 3), &cb).unwrap();
        let positives = ds.y.iter().filter(|&&y| y == 1.0).count();
        assert!(
            (400..=600).contains(&positives),
            "{positives} cyclic of 1000"
        );
        assert_eq!(ds.train.len(), 800);
        assert_eq!(ds.test.len(), 200);
        let mut all: Vec<usize> = ds.train.iter().chain(&ds.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn num_nodes_targets_are_true_sizes() {
        let cb = build_codebook(256, 2, 16, 0).unwrap();
        let cfg = DatasetConfig::new(Task::NumNodes, 30, 4);
        let ds = build_dataset(&cfg, &cb).unwrap();
        for row in 0..30 {
            let mut rng = substream(4, Role::Experiment, DATASET_STREAM + row as u64);
            let g = cfg.family.sample(&mut rng).unwrap();
            assert_eq!(ds.y[row], g.n() as f64);
        }
    }

    #[test]
    fn dataset_errors() {
        let cb = build_codebook(64, 2, 10, 0).unwrap();
        assert!(matches!(
            build_dataset(&DatasetConfig::new(Task::NumNodes, 0, 1), &cb),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            build_dataset(&DatasetConfig::new(Task::NumNodes, 5, 1), &cb),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!("num_nodes".parse::<Task>().is_ok());
        assert!("diameter".parse::<Task>().is_err());
    }

    #[test]
    fn mixed_family_samples_every_kind() {
        let fam = GraphFamily::Mixed { n_min: 5, n_max: 9 };
        let mut rng = substream(0, Role::Experiment, 1);
        for _ in 0..100 {
            let g = fam.sample(&mut rng).unwrap();
            assert!((5..=9).contains(&g.n()));
        }
    }
}
