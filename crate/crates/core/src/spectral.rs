//! Incidence matrix, Laplacian `Δ = I·Iᵀ`, Dirac operator `D = Q√Λ Qᵀ` and
//! the coefficient matrices `E_k = D·diag(e_k)`.
//!
//! Dense only; this is a diagnostic, not part of the encoding path.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_SPECTRAL_VERTICES: usize = 512;
/// Relative tolerance (against `‖Δ‖_F`) for clamping small negative eigenvalues.
pub const EIG_RELATIVE_TOLERANCE: f64 = 1e-10;

/// `|V| × |E|`, column `k` for edge `(i, j)` holding `-1` at `i` and `+1` at
/// `j` (orientation `i → j` for `i < j`).
pub fn incidence_matrix(g: &Graph) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(g.n(), g.edge_count());
    for (k, (i, j)) in g.edges().enumerate() {
        m[(i - 1, k)] = -1.0;
        m[(j - 1, k)] = 1.0;
    }
    m
}

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let inc = incidence_matrix(g);
    &inc * inc.transpose()
}

#[derive(Debug, Clone)]
pub struct SpectralBundle {
    pub incidence: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    /// Eigenvalues after clamping `[-ε, 0)` to zero, ascending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors, column `k` paired with `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
    pub dirac: DMatrix<f64>,
    pub tolerance: f64,
}

impl SpectralBundle {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.n() == 0 {
            return Err(Error::invalid("spectral objects need at least one vertex"));
        }
        if g.n() > MAX_SPECTRAL_VERTICES {
            return Err(Error::invalid(format!(
                "dense spectral diagnostic is capped at {MAX_SPECTRAL_VERTICES} vertices"
            )));
        }
        let incidence = incidence_matrix(g);
        let laplacian = &incidence * incidence.transpose();
        let tolerance = EIG_RELATIVE_TOLERANCE * laplacian.norm();

        let eig = SymmetricEigen::new(laplacian.clone());
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut eigenvalues = DVector::zeros(g.n());
        let mut eigenvectors = DMatrix::zeros(g.n(), g.n());
        for (dst, &src) in order.iter().enumerate() {
            let value = eig.eigenvalues[src];
            if value < -tolerance {
                return Err(Error::NegativeEigenvalue { value, tolerance });
            }
            eigenvalues[dst] = value.max(0.0);
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        let root = DMatrix::from_diagonal(&eigenvalues.map(f64::sqrt));
        let dirac = &eigenvectors * root * eigenvectors.transpose();
        // Symmetrize away roundoff.
        let dirac = (&dirac + dirac.transpose()) * 0.5;
        Ok(Self {
            incidence,
            laplacian,
            eigenvalues,
            eigenvectors,
            dirac,
            tolerance,
        })
    }

    /// `E_k = D·diag(e_k)`: column `k` of `D`, zeros elsewhere.
    pub fn coefficient(&self, k: usize) -> DMatrix<f64> {
        let n = self.dirac.nrows();
        let mut e = DMatrix::zeros(n, n);
        e.set_column(k, &self.dirac.column(k));
        e
    }

    pub fn coefficients(&self) -> Vec<DMatrix<f64>> {
        (0..self.dirac.nrows())
            .map(|k| self.coefficient(k))
            .collect()
    }

    /// Eigenvalues within a generous tolerance of zero.
    pub fn zero_eigenvalue_multiplicity(&self) -> usize {
        let tol = 1e-8 * self.laplacian.norm().max(1.0);
        self.eigenvalues.iter().filter(|&&l| l.abs() <= tol).count()
    }

    pub fn check(&self) -> DiracCheck {
        let lap_norm = self.laplacian.norm();
        let square_err = (&self.dirac * &self.dirac - &self.laplacian).norm();
        let sum: DMatrix<f64> = self.coefficients().into_iter().fold(
            DMatrix::zeros(self.dirac.nrows(), self.dirac.ncols()),
            |acc, e| acc + e,
        );
        DiracCheck {
            n: self.dirac.nrows(),
            edges: self.incidence.ncols(),
            square_relative_error: if lap_norm > 0.0 {
                square_err / lap_norm
            } else {
                square_err
            },
            coefficient_sum_error: (sum - &self.dirac).amax(),
            symmetry_error: (&self.dirac - self.dirac.transpose()).amax(),
            laplacian_row_sum_error: self.laplacian.row_sum().amax(),
            zero_eigenvalues: self.zero_eigenvalue_multiplicity(),
            smallest_eigenvalue: self.eigenvalues[0],
        }
    }
}

pub fn dirac(g: &Graph) -> Result<DMatrix<f64>> {
    Ok(SpectralBundle::new(g)?.dirac)
}

pub fn coefficient_matrices(g: &Graph) -> Result<Vec<DMatrix<f64>>> {
    Ok(SpectralBundle::new(g)?.coefficients())
}

/// Numbers reported by the `dirac-check` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiracCheck {
    pub n: usize,
    pub edges: usize,
    /// `‖D·D − Δ‖_F / ‖Δ‖_F` (absolute when `Δ = 0`).
    pub square_relative_error: f64,
    /// `max |Σ_k E_k − D|`.
    pub coefficient_sum_error: f64,
    pub symmetry_error: f64,
    pub laplacian_row_sum_error: f64,
    pub zero_eigenvalues: usize,
    pub smallest_eigenvalue: f64,
}
