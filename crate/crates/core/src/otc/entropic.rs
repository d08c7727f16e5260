//! Approximate policy iteration with truncated evaluation and Sinkhorn
//! improvement.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::evaluate::evaluate;
use super::{check_kernel_inputs, finish, kernels_for, state_cost, Diagnostics, Grids, OtcSolution, SolverTag};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::network::Network;
use crate::ot::{log_sinkhorn, round_to_marginals};

/// Parameters of the entropic solver.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EntropicParams {
    /// Outer (policy) iterations `L`.
    pub outer_iterations: usize,
    /// Evaluation horizon `T`.
    pub horizon: usize,
    /// Regularization strength `ξ`.
    pub xi: f64,
    pub sinkhorn_iterations: usize,
}

impl Default for EntropicParams {
    fn default() -> Self {
        EntropicParams {
            outer_iterations: 10,
            horizon: 50,
            xi: 100.0,
            sinkhorn_iterations: 50,
        }
    }
}

/// Entropically regularized OTC.
///
/// The reported `ρ` is `⟨λ, c⟩` for the feasible coupling actually produced,
/// so it never falls below the exact optimum.
pub fn solve_entropic_otc(g1: &Network, g2: &Network, cost: &CostMatrix, params: EntropicParams) -> Result<OtcSolution> {
    let (p, q) = kernels_for(g1, g2, cost)?;
    entropic_otc_kernels(&p, &q, cost.values(), params)
}

pub fn entropic_otc_kernels(
    p: &MarkovKernel,
    q: &MarkovKernel,
    cost: &DMatrix<f64>,
    params: EntropicParams,
) -> Result<OtcSolution> {
    check_kernel_inputs(p, q, cost)?;
    if params.outer_iterations == 0 || params.horizon == 0 || params.sinkhorn_iterations == 0 {
        return Err(Error::InvalidParameter("L, T and Sinkhorn iterations must be at least 1".into()));
    }
    if !(params.xi > 0.0 && params.xi.is_finite()) {
        return Err(Error::InvalidParameter(format!("ξ = {} must be positive", params.xi)));
    }
    let grids = Grids::new(p, q);
    let c = state_cost(cost);
    let n = grids.states();
    let mut plans: Vec<Vec<f64>> = (0..n).map(|s| grids.independent_plan(s)).collect();
    let mut history = Vec::with_capacity(params.outer_iterations);
    let mut last_residual = 0.0;

    for _ in 0..params.outer_iterations {
        let rows = grids.sparse_rows(&plans);
        let accumulated = truncated_cost(&rows, &c, params.horizon);
        let sweep: Vec<Result<(Vec<f64>, f64)>> = (0..n)
            .into_par_iter()
            .map(|s| {
                let (mu, nu) = grids.marginals(s);
                let local = grids.local(s, &accumulated);
                let cm = DMatrix::from_row_slice(mu.len(), nu.len(), &local);
                let out = log_sinkhorn(&mu, &nu, &cm, params.xi, params.sinkhorn_iterations)?;
                let residual = *out.residuals.last().expect("at least one iteration");
                let mut plan = out.plan;
                round_to_marginals(&mut plan, &mu, &nu);
                let flat = (0..mu.len())
                    .flat_map(|i| (0..nu.len()).map(move |j| (i, j)))
                    .map(|(i, j)| plan[(i, j)])
                    .collect();
                Ok((flat, residual))
            })
            .collect();
        last_residual = 0.0f64;
        for (s, item) in sweep.into_iter().enumerate() {
            let (plan, residual) = item?;
            plans[s] = plan;
            last_residual = last_residual.max(residual);
        }
        history.push(evaluate(&grids.sparse_rows(&plans), &c)?.rho());
    }

    let coupling = finish(p.n(), q.n(), grids.sparse_rows(&plans), &c)?;
    let diagnostics = Diagnostics {
        solver: SolverTag::Entropic,
        iterations: params.outer_iterations,
        objective_history: history,
        sinkhorn_residual: Some(last_residual),
    };
    Ok(OtcSolution::new(coupling, cost, diagnostics))
}

/// `Σ_{t<T} Rᵗc`: expected cost accumulated over the next `T` steps.
fn truncated_cost(rows: &[Vec<(usize, f64)>], c: &[f64], horizon: usize) -> Vec<f64> {
    let mut current = c.to_vec();
    let mut total = c.to_vec();
    for _ in 1..horizon {
        current = rows
            .iter()
            .map(|row| row.iter().map(|&(t, r)| r * current[t]).sum())
            .collect();
        total.iter_mut().zip(&current).for_each(|(a, b)| *a += b);
    }
    total
}
