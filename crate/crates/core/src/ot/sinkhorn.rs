//! Log-domain Sinkhorn scaling.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Scaled plan `diag(a)·exp(−ξ·C)·diag(b)` on strictly positive marginals.
#[derive(Debug, Clone)]
pub(crate) struct LogSinkhorn {
    pub plan: DMatrix<f64>,
    /// L1 row-marginal residual after each iteration (columns are exact after
    /// every column update).
    pub residuals: Vec<f64>,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub(crate) fn log_sinkhorn(
    mu: &[f64],
    nu: &[f64],
    cost: &DMatrix<f64>,
    xi: f64,
    iters: usize,
) -> Result<LogSinkhorn> {
    let m = mu.len();
    let n = nu.len();
    // The Gibbs kernel is invariant to a constant shift of the cost.
    let shift = cost.iter().copied().fold(f64::INFINITY, f64::min);
    let scaled = cost.map(|c| -xi * (c - shift));
    if scaled.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalUnderflow(format!(
            "ξ·cost is not representable (ξ = {xi})"
        )));
    }
    let log_mu: Vec<f64> = mu.iter().map(|x| x.ln()).collect();
    let log_nu: Vec<f64> = nu.iter().map(|x| x.ln()).collect();
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; n];
    let mut residuals = Vec::with_capacity(iters);

    for _ in 0..iters {
        for i in 0..m {
            let lse = log_sum_exp((0..n).map(|j| beta[j] + scaled[(i, j)]));
            alpha[i] = log_mu[i] - lse;
        }
        for j in 0..n {
            let lse = log_sum_exp((0..m).map(|i| alpha[i] + scaled[(i, j)]));
            beta[j] = log_nu[j] - lse;
        }
        let residual: f64 = (0..m)
            .map(|i| {
                let row: f64 = (0..n).map(|j| (alpha[i] + beta[j] + scaled[(i, j)]).exp()).sum();
                (row - mu[i]).abs()
            })
            .sum();
        if !residual.is_finite() {
            return Err(Error::NumericalUnderflow("Sinkhorn potentials diverged".into()));
        }
        residuals.push(residual);
    }

    let plan = DMatrix::from_fn(m, n, |i, j| (alpha[i] + beta[j] + scaled[(i, j)]).exp());
    if plan.sum() <= 0.0 || plan.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalUnderflow("Sinkhorn plan lost all mass".into()));
    }
    Ok(LogSinkhorn { plan, residuals })
}

/// Projects a positive plan onto the exact coupling polytope of `(mu, nu)`:
/// shrink rows, shrink columns, then spread the remaining deficit as a
/// rank-one correction. Support never grows beyond `supp(mu) × supp(nu)`.
pub(crate) fn round_to_marginals(plan: &mut DMatrix<f64>, mu: &[f64], nu: &[f64]) {
    let (m, n) = plan.shape();
    for i in 0..m {
        let r: f64 = plan.row(i).sum();
        if r > mu[i] {
            let s = mu[i] / r;
            plan.row_mut(i).iter_mut().for_each(|x| *x *= s);
        }
    }
    for j in 0..n {
        let c: f64 = plan.column(j).sum();
        if c > nu[j] {
            let s = nu[j] / c;
            plan.column_mut(j).iter_mut().for_each(|x| *x *= s);
        }
    }
    let row_def: Vec<f64> = (0..m).map(|i| (mu[i] - plan.row(i).sum()).max(0.0)).collect();
    let col_def: Vec<f64> = (0..n).map(|j| (nu[j] - plan.column(j).sum()).max(0.0)).collect();
    let total: f64 = row_def.iter().sum();
    if total > 0.0 {
        for i in 0..m {
            for j in 0..n {
                plan[(i, j)] += row_def[i] * col_def[j] / total;
            }
        }
    }
}
