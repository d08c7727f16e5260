//! Policy iteration over transition couplings.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::evaluate::{evaluate, Evaluation};
use super::{check_kernel_inputs, finish, kernels_for, state_cost, Diagnostics, Grids, OtcSolution, SolverTag};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::network::Network;
use crate::ot::transport::{self, TransportSolution};

/// Knobs for [`solve_exact_otc_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParams {
    pub max_iterations: usize,
}

impl Default for ExactParams {
    fn default() -> Self {
        ExactParams { max_iterations: 50 }
    }
}

/// Optimal transition coupling of the random walks on `g1` and `g2`.
pub fn solve_exact_otc(g1: &Network, g2: &Network, cost: &CostMatrix) -> Result<OtcSolution> {
    solve_exact_otc_with(g1, g2, cost, ExactParams::default())
}

pub fn solve_exact_otc_with(g1: &Network, g2: &Network, cost: &CostMatrix, params: ExactParams) -> Result<OtcSolution> {
    let (p, q) = kernels_for(g1, g2, cost)?;
    exact_otc_kernels(&p, &q, cost.values(), params)
}

/// Same as [`solve_exact_otc`] on explicit irreducible kernels.
pub fn exact_otc_kernels(
    p: &MarkovKernel,
    q: &MarkovKernel,
    cost: &DMatrix<f64>,
    params: ExactParams,
) -> Result<OtcSolution> {
    check_kernel_inputs(p, q, cost)?;
    let grids = Grids::new(p, q);
    let c = state_cost(cost);
    let n = grids.states();
    let mut plans: Vec<Vec<f64>> = (0..n).map(|s| grids.independent_plan(s)).collect();
    let mut history = Vec::new();

    for iteration in 1..=params.max_iterations {
        let eval = evaluate(&grids.sparse_rows(&plans), &c)?;
        history.push(eval.rho());
        if !improve(&grids, &mut plans, &eval) {
            let coupling = finish(p.n(), q.n(), grids.sparse_rows(&plans), &c)?;
            let diagnostics = Diagnostics {
                solver: SolverTag::Exact,
                iterations: iteration,
                objective_history: history,
                sinkhorn_residual: None,
            };
            return Ok(OtcSolution::new(coupling, cost, diagnostics));
        }
    }
    Err(Error::IterationCapExceeded {
        cap: params.max_iterations,
    })
}

fn value(plan: &[f64], cost: &[f64]) -> f64 {
    plan.iter().zip(cost).map(|(x, c)| x * c).sum()
}

fn tolerance(f: &[f64]) -> f64 {
    1e-10 * (1.0 + f.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// One improvement step. Returns whether any row changed.
///
/// First every row is re-optimized against the gain. Only if no row can lower
/// its expected gain are rows re-optimized against the bias, restricted to
/// couplings that stay gain-optimal. A row is replaced only on strict
/// improvement beyond tolerance.
fn improve(grids: &Grids, plans: &mut [Vec<f64>], eval: &Evaluation) -> bool {
    let tol_g = tolerance(&eval.gain);
    let stage_one: Vec<(Vec<f64>, TransportSolution, Option<Vec<f64>>)> = (0..plans.len())
        .into_par_iter()
        .map(|s| {
            let (supply, demand) = grids.marginals(s);
            let cg = grids.local(s, &eval.gain);
            let sol = transport::solve(&supply, &demand, &cg, None, None);
            let better = value(&plans[s], &cg) > sol.value + tol_g;
            let replacement = better.then(|| sol.flow.clone());
            (cg, sol, replacement)
        })
        .collect();
    let mut changed = false;
    for (s, (_, _, replacement)) in stage_one.iter().enumerate() {
        if let Some(plan) = replacement {
            plans[s] = plan.clone();
            changed = true;
        }
    }
    if changed {
        return true;
    }

    let tol_h = tolerance(&eval.bias);
    let face_tol = 10.0 * tol_g;
    let stage_two: Vec<Option<Vec<f64>>> = stage_one
        .par_iter()
        .enumerate()
        .map(|(s, (cg, sol_g, _))| {
            let (supply, demand) = grids.marginals(s);
            let nb = demand.len();
            let allowed: Vec<bool> = (0..cg.len())
                .map(|k| sol_g.reduced_cost(cg, k / nb, k % nb) <= face_tol)
                .collect();
            let ch = grids.local(s, &eval.bias);
            let sol = transport::solve(&supply, &demand, &ch, Some(&allowed), Some(sol_g));
            (value(&plans[s], &ch) > sol.value + tol_h).then_some(sol.flow)
        })
        .collect();
    for (s, replacement) in stage_two.into_iter().enumerate() {
        if let Some(plan) = replacement {
            plans[s] = plan;
            changed = true;
        }
    }
    changed
}
