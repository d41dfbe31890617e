use nalgebra::{DMatrix, DVector};

use super::LabeledEmbeddingSet;
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA_GRID: [f64; 7] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];

/// Linear head `X·W + b`. Classification heads carry one ±1 column per
/// class (a single column for two classes).
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub lambda: f64,
    /// Class labels, in column order, for classification heads.
    pub classes: Option<Vec<f64>>,
}

impl RidgeModel {
    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn raw(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x * &self.weights;
        for mut row in out.row_iter_mut() {
            row += self.bias.transpose();
        }
        out
    }
}

/// Multi-output ridge with an unpenalized intercept. Solves through the
/// `d × d` normal equations or the `m × m` dual, whichever is smaller.
pub fn ridge_solve(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    lambda: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid("ridge penalty must be positive"));
    }
    if x.nrows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.nrows() != y.nrows() {
        return Err(Error::invalid(
            "row count differs between inputs and targets",
        ));
    }
    let x_mean = x.row_mean();
    let y_mean = y.row_mean();
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        row -= &x_mean;
    }
    let mut yc = y.clone();
    for mut row in yc.row_iter_mut() {
        row -= &y_mean;
    }
    let (m, d) = xc.shape();
    let singular = || Error::invalid("ridge system is not positive definite");
    let weights = if d <= m {
        let mut gram = xc.transpose() * &xc;
        for k in 0..d {
            gram[(k, k)] += lambda;
        }
        let rhs = xc.transpose() * &yc;
        gram.cholesky().ok_or_else(singular)?.solve(&rhs)
    } else {
        let mut kernel = &xc * xc.transpose();
        for k in 0..m {
            kernel[(k, k)] += lambda;
        }
        let alpha = kernel.cholesky().ok_or_else(singular)?.solve(&yc);
        xc.transpose() * alpha
    };
    let bias = (y_mean - x_mean * &weights).transpose();
    Ok((weights, bias))
}

fn class_labels(y: &[f64]) -> Vec<f64> {
    let mut classes = y.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    classes
}

fn targets_matrix(y: &[f64], classes: Option<&[f64]>) -> DMatrix<f64> {
    match classes {
        None => DMatrix::from_column_slice(y.len(), 1, y),
        Some(classes) if classes.len() <= 2 => {
            let positive = classes.last().copied().unwrap_or(1.0);
            DMatrix::from_fn(y.len(), 1, |r, _| if y[r] == positive { 1.0 } else { -1.0 })
        }
        Some(classes) => DMatrix::from_fn(y.len(), classes.len(), |r, c| {
            if y[r] == classes[c] {
                1.0
            } else {
                -1.0
            }
        }),
    }
}

fn fit_rows(ds: &LabeledEmbeddingSet, rows: &[usize], lambda: f64) -> Result<RidgeModel> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let x = ds.rows(rows);
    let y = ds.targets(rows);
    let classes = ds.task.is_classification().then(|| class_labels(&y));
    let t = targets_matrix(&y, classes.as_deref());
    let (weights, bias) = ridge_solve(&x, &t, lambda)?;
    Ok(RidgeModel {
        weights,
        bias,
        lambda,
        classes,
    })
}

/// Closed-form fit on the training split.
pub fn ridge_fit(ds: &LabeledEmbeddingSet, lambda: f64) -> Result<RidgeModel> {
    fit_rows(ds, &ds.train, lambda)
}

/// Picks the penalty on the last fifth of the training split, then refits
/// on the full training split.
pub fn ridge_fit_cv(ds: &LabeledEmbeddingSet, lambdas: &[f64]) -> Result<RidgeModel> {
    let grid = if lambdas.is_empty() {
        &DEFAULT_LAMBDA_GRID[..]
    } else {
        lambdas
    };
    if grid.len() == 1 || ds.train.len() < 10 {
        return ridge_fit(ds, grid[0]);
    }
    let cut = ds.train.len() * 4 / 5;
    let (fit, val) = ds.train.split_at(cut);
    let val_x = ds.rows(val);
    let val_y = ds.targets(val);
    let mut best = (f64::NEG_INFINITY, grid[0]);
    for &lambda in grid {
        let model = fit_rows(ds, fit, lambda)?;
        let metric = super::score_predictions(ds.task, &ridge_predict(&model, &val_x), &val_y);
        // Higher is better for accuracy; flip MSE.
        let quality = if ds.task.is_classification() {
            metric
        } else {
            -metric
        };
        if quality > best.0 {
            best = (quality, lambda);
        }
    }
    ridge_fit(ds, best.1)
}

/// Regression values, or class labels for classification heads.
pub fn ridge_predict(model: &RidgeModel, x: &DMatrix<f64>) -> Vec<f64> {
    let raw = model.raw(x);
    match &model.classes {
        None => raw.column(0).iter().copied().collect(),
        Some(classes) if raw.ncols() == 1 => {
            let (neg, pos) = match classes.as_slice() {
                [only] => (*only, *only),
                [a, b, ..] => (*a, *b),
                [] => (0.0, 1.0),
            };
            raw.column(0)
                .iter()
                .map(|&v| if v >= 0.0 { pos } else { neg })
                .collect()
        }
        Some(classes) => raw
            .row_iter()
            .map(|row| classes[row.transpose().argmax().0])
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::Task;
    use crate::rng::{substream, Role};
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, stream: u64) -> DMatrix<f64> {
        let mut rng = substream(5, Role::Experiment, stream);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn normal_equation_residual(x: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64) -> f64 {
        let (w, _) = ridge_solve(x, y, lambda).unwrap();
        let mut xc = x.clone();
        let xm = x.row_mean();
        for mut r in xc.row_iter_mut() {
            r -= &xm;
        }
        let mut yc = y.clone();
        let ym = y.row_mean();
        for mut r in yc.row_iter_mut() {
            r -= &ym;
        }
        let mut lhs = xc.transpose() * &xc * &w;
        lhs += &w * lambda;
        let rhs = xc.transpose() * yc;
        (lhs - &rhs).norm() / rhs.norm()
    }

    #[test]
    fn normal_equations_hold_for_both_routes() {
        let y_tall = random_matrix(60, 2, 2);
        assert!(normal_equation_residual(&random_matrix(60, 8, 1), &y_tall, 0.3) < 1e-8);
        let y_wide = random_matrix(12, 1, 4);
        assert!(normal_equation_residual(&random_matrix(12, 40, 3), &y_wide, 0.3) < 1e-8);
    }

    #[test]
    fn realizable_target_is_recovered() {
        let x = random_matrix(200, 10, 6);
        let w_true = random_matrix(10, 1, 7);
        let y = &x * &w_true;
        let (w, b) = ridge_solve(&x, &y, 1e-8).unwrap();
        let pred = &x * w + DMatrix::from_element(200, 1, b[0]);
        let mse = (pred - y).norm_squared() / 200.0;
        assert!(mse < 1e-10, "mse {mse}");
    }

    #[test]
    fn rejects_nonpositive_penalty() {
        let x = random_matrix(5, 2, 8);
        assert!(ridge_solve(&x, &random_matrix(5, 1, 9), 0.0).is_err());
    }

    #[test]
    fn binary_and_multiclass_readouts() {
        let x = DMatrix::from_row_slice(6, 1, &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let ds = LabeledEmbeddingSet {
            task: Task::HasCycle,
            x: x.clone(),
            y: vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            train: (0..6).collect(),
            test: vec![],
        };
        let m = ridge_fit(&ds, 1e-3).unwrap();
        assert_eq!(ridge_predict(&m, &x), ds.y);

        let x3 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let t = targets_matrix(&[0.0, 1.0, 2.0], Some(&[0.0, 1.0, 2.0]));
        let (weights, bias) = ridge_solve(&x3, &t, 1e-6).unwrap();
        let model = RidgeModel {
            weights,
            bias,
            lambda: 1e-6,
            classes: Some(vec![0.0, 1.0, 2.0]),
        };
        assert_eq!(ridge_predict(&model, &x3), vec![0.0, 1.0, 2.0]);
    }
}
