//! Random-walk kernels and their stationary laws.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scc::strongly_connected_components;

/// Largest state count solved by a direct dense factorization; larger
/// kernels fall back to power iteration.
pub const DENSE_SOLVE_LIMIT: usize = 512;

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const POWER_ITERATION_CAP: usize = 1_000_000;

/// Row-stochastic transition matrix `P(u'|u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKernel {
    matrix: DMatrix<f64>,
}

impl MarkovKernel {
    /// Wraps an explicit matrix, checking that it is square, nonnegative and
    /// row-stochastic within `1e-12`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        for u in 0..n {
            let row = matrix.row(u);
            if row.iter().any(|x| *x < 0.0 || !x.is_finite()) {
                return Err(Error::MarginalInvalid(format!("row {u} has a negative entry")));
            }
            let s: f64 = row.sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::MarginalInvalid(format!("row {u} sums to {s}")));
            }
        }
        Ok(MarkovKernel { matrix })
    }

    pub(crate) fn from_normalized(matrix: DMatrix<f64>) -> Self {
        MarkovKernel { matrix }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.matrix[(from, to)]
    }

    /// Indices and probabilities of the positive entries of row `u`.
    pub fn support(&self, u: usize) -> Vec<(usize, f64)> {
        (0..self.n())
            .filter_map(|v| {
                let p = self.matrix[(u, v)];
                (p > 0.0).then_some((v, p))
            })
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        strongly_connected_components(self.n(), |u| {
            (0..self.n()).filter(move |&v| self.matrix[(u, v)] > 0.0)
        })
        .count()
            == 1
    }

    /// Unique stationary law of an irreducible kernel.
    ///
    /// Solved directly for up to [`DENSE_SOLVE_LIMIT`] states, by power
    /// iteration on the lazy chain above that.
    pub fn stationary_distribution(&self) -> Result<StationaryDistribution> {
        if !self.is_irreducible() {
            return Err(Error::NotStronglyConnected);
        }
        let probs = if self.n() <= DENSE_SOLVE_LIMIT {
            stationary_dense(&self.matrix).ok_or(Error::NumericalNonConvergence {
                residual: f64::INFINITY,
            })?
        } else {
            stationary_power(&self.matrix)?
        };
        let dist = StationaryDistribution { probs };
        let residual = dist.residual(self);
        if residual > STATIONARY_TOL {
            return Err(Error::NumericalNonConvergence { residual });
        }
        Ok(dist)
    }
}

/// Probability vector `p` with `pP = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
}

impl StationaryDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// `‖pP − p‖₁`.
    pub fn residual(&self, kernel: &MarkovKernel) -> f64 {
        let n = kernel.n();
        (0..n)
            .map(|v| {
                let flow: f64 = (0..n).map(|u| self.probs[u] * kernel.prob(u, v)).sum();
                (flow - self.probs[v]).abs()
            })
            .sum()
    }
}

/// Solves `(I − P + J)ᵀ x = 1` for an irreducible stochastic `P`.
pub(crate) fn stationary_dense(p: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = p.nrows();
    let mut a = DMatrix::<f64>::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..n {
            // transpose of (I - P + J)
            a[(j, i)] -= p[(i, j)];
        }
        a[(i, i)] += 1.0;
    }
    let x = a.lu().solve(&DVector::from_element(n, 1.0))?;
    Some(clean_distribution(x.as_slice()))
}

fn stationary_power(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let pt = p.transpose();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let px = &pt * &x;
        // lazy chain (I + P) / 2 removes periodicity without moving the fixed point
        let next = (&x + &px) * 0.5;
        residual = (&px - &x).abs().sum();
        x = next;
        if residual <= STATIONARY_TOL * 0.1 {
            return Ok(clean_distribution(x.as_slice()));
        }
    }
    Err(Error::NumericalNonConvergence { residual })
}

/// Clamps round-off negatives and renormalizes.
pub(crate) fn clean_distribution(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|&a| a.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|a| *a /= s);
    v
}
