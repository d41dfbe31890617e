use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::LabeledEmbeddingSet;
use crate::error::{Error, Result};
use crate::rng::{substream, Role};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 16,
            epochs: 150,
            learning_rate: 3e-3,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Objective {
    /// Squared error on standardized targets.
    Regression { mean: f64, std: f64 },
    /// Softmax cross-entropy; `classes[k]` is the label of output `k`.
    Classification { classes: Vec<f64> },
}

/// `tanh` hidden layer followed by a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    w1: DMatrix<f64>,
    b1: DVector<f64>,
    w2: DMatrix<f64>,
    b2: DVector<f64>,
    objective: Objective,
}

enum Targets {
    Values(DVector<f64>),
    Classes(Vec<usize>),
}

struct Gradient {
    w1: DMatrix<f64>,
    b1: DVector<f64>,
    w2: DMatrix<f64>,
    b2: DVector<f64>,
}

fn add_row_bias(m: &mut DMatrix<f64>, b: &DVector<f64>) {
    for mut row in m.row_iter_mut() {
        row += b.transpose();
    }
}

impl Mlp {
    fn init(inputs: usize, hidden: usize, objective: Objective, seed: u64) -> Self {
        let outputs = match &objective {
            Objective::Regression { .. } => 1,
            Objective::Classification { classes } => classes.len(),
        };
        let mut rng = substream(seed, Role::Experiment, 0x4D4C_5000);
        let mut draw = |rows, cols, fan_in: usize| {
            let normal = Normal::new(0.0, (1.0 / fan_in as f64).sqrt()).expect("positive std");
            DMatrix::from_fn(rows, cols, |_, _| normal.sample(&mut rng))
        };
        let w1 = draw(hidden, inputs, inputs);
        let w2 = draw(outputs, hidden, hidden);
        Self {
            w1,
            b1: DVector::zeros(hidden),
            w2,
            b2: DVector::zeros(outputs),
            objective,
        }
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// All parameters, flattened as `w1, b1, w2, b2` (column-major).
    pub fn params(&self) -> Vec<f64> {
        self.w1
            .iter()
            .chain(self.b1.iter())
            .chain(self.w2.iter())
            .chain(self.b2.iter())
            .copied()
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "parameter vector length");
        let mut it = flat.iter().copied();
        for target in [
            self.w1.as_mut_slice(),
            self.b1.as_mut_slice(),
            self.w2.as_mut_slice(),
            self.b2.as_mut_slice(),
        ] {
            for slot in target {
                *slot = it.next().expect("length checked");
            }
        }
    }

    fn encode_targets(&self, y: &[f64]) -> Targets {
        match &self.objective {
            Objective::Regression { mean, std } => Targets::Values(DVector::from_iterator(
                y.len(),
                y.iter().map(|v| (v - mean) / std),
            )),
            Objective::Classification { classes } => Targets::Classes(
                y.iter()
                    .map(|v| classes.iter().position(|c| c == v).unwrap_or(0))
                    .collect(),
            ),
        }
    }

    fn forward(&self, x: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut hidden = x * self.w1.transpose();
        add_row_bias(&mut hidden, &self.b1);
        hidden.apply(|v| *v = v.tanh());
        let mut out = &hidden * self.w2.transpose();
        add_row_bias(&mut out, &self.b2);
        (hidden, out)
    }

    fn loss_grad(&self, x: &DMatrix<f64>, targets: &Targets) -> (f64, Gradient) {
        let m = x.nrows() as f64;
        let (hidden, out) = self.forward(x);
        let (loss, d_out) = match targets {
            Targets::Values(t) => {
                let diff = out.column(0) - t;
                let loss = 0.5 * diff.norm_squared() / m;
                (
                    loss,
                    DMatrix::from_column_slice(diff.len(), 1, (diff / m).as_slice()),
                )
            }
            Targets::Classes(labels) => {
                let mut grad = out.clone();
                let mut loss = 0.0;
                for (r, &label) in labels.iter().enumerate() {
                    let row = out.row(r);
                    let max = row.max();
                    let z: f64 = row.iter().map(|v| (v - max).exp()).sum();
                    loss += z.ln() + max - row[label];
                    for c in 0..out.ncols() {
                        let p = (out[(r, c)] - max).exp() / z;
                        grad[(r, c)] = (p - if c == label { 1.0 } else { 0.0 }) / m;
                    }
                }
                (loss / m, grad)
            }
        };
        let w2 = d_out.transpose() * &hidden;
        let b2 = d_out.row_sum().transpose();
        let mut d_hidden = &d_out * &self.w2;
        d_hidden.zip_apply(&hidden, |g, h| *g *= 1.0 - h * h);
        let w1 = d_hidden.transpose() * x;
        let b1 = d_hidden.row_sum().transpose();
        (loss, Gradient { w1, b1, w2, b2 })
    }

    /// Mean loss and flattened gradient (same layout as [`Mlp::params`]) on
    /// raw targets.
    pub fn loss_and_gradient(&self, x: &DMatrix<f64>, y: &[f64]) -> (f64, Vec<f64>) {
        let (loss, g) = self.loss_grad(x, &self.encode_targets(y));
        let flat =
            g.w1.iter()
                .chain(g.b1.iter())
                .chain(g.w2.iter())
                .chain(g.b2.iter())
                .copied()
                .collect();
        (loss, flat)
    }

    pub fn loss(&self, x: &DMatrix<f64>, y: &[f64]) -> f64 {
        self.loss_and_gradient(x, y).0
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let (_, out) = self.forward(x);
        match &self.objective {
            Objective::Regression { mean, std } => {
                out.column(0).iter().map(|v| v * std + mean).collect()
            }
            Objective::Classification { classes } => out
                .row_iter()
                .map(|row| classes[row.transpose().argmax().0])
                .collect(),
        }
    }
}

/// Builds an untrained network shaped for `ds` (used by gradient checks).
pub(crate) fn untrained(ds: &LabeledEmbeddingSet, rows: &[usize], cfg: &MlpConfig) -> Mlp {
    let y: Vec<f64> = rows.iter().map(|&r| ds.y[r]).collect();
    let objective = if ds.task.is_classification() {
        let mut classes = y.clone();
        classes.sort_by(f64::total_cmp);
        classes.dedup();
        if classes.len() < 2 {
            classes = vec![0.0, 1.0];
        }
        Objective::Classification { classes }
    } else {
        let mean = y.iter().sum::<f64>() / y.len().max(1) as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len().max(1) as f64;
        Objective::Regression {
            mean,
            std: var.sqrt().max(1e-12),
        }
    };
    Mlp::init(ds.dim(), cfg.hidden, objective, cfg.seed)
}

/// Mini-batch Adam on the training split.
pub fn mlp_fit(ds: &LabeledEmbeddingSet, cfg: &MlpConfig) -> Result<Mlp> {
    if cfg.hidden == 0 || cfg.batch_size == 0 {
        return Err(Error::invalid(
            "hidden width and batch size must be positive",
        ));
    }
    if !cfg.learning_rate.is_finite() || cfg.learning_rate <= 0.0 {
        return Err(Error::invalid("learning rate must be positive"));
    }
    if ds.train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut model = untrained(ds, &ds.train, cfg);
    let (beta1, beta2, eps) = (0.9f64, 0.999f64, 1e-8);
    let n_params = model.param_count();
    let mut first = vec![0.0; n_params];
    let mut second = vec![0.0; n_params];
    let mut params = model.params();
    let mut order = ds.train.clone();
    let mut rng = substream(cfg.seed, Role::Experiment, 0x4D4C_5001);
    let mut step = 0i32;
    let mut last_loss = f64::NAN;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let x = ds.rows(batch);
            let y = ds.targets(batch);
            let (loss, grad) = model.loss_and_gradient(&x, &y);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch, last_loss });
            }
            epoch_loss += loss * batch.len() as f64;
            step += 1;
            let c1 = 1.0 - beta1.powi(step);
            let c2 = 1.0 - beta2.powi(step);
            for k in 0..n_params {
                first[k] = beta1 * first[k] + (1.0 - beta1) * grad[k];
                second[k] = beta2 * second[k] + (1.0 - beta2) * grad[k] * grad[k];
                params[k] -= cfg.learning_rate * (first[k] / c1) / ((second[k] / c2).sqrt() + eps);
            }
            model.set_params(&params);
        }
        last_loss = epoch_loss / order.len() as f64;
        log::debug!("epoch {epoch}: loss {last_loss:.6}");
    }
    Ok(model)
}
