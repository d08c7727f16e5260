//! Myopic and marginal baselines.

use nalgebra::DMatrix;

use super::{check_kernel_inputs, finish, kernels_for, state_cost, Diagnostics, Grids, OtcSolution, SolverTag};
use crate::cost::CostMatrix;
use crate::error::Result;
use crate::markov::MarkovKernel;
use crate::network::Network;
use crate::ot::{ot_exact, transport, Coupling};

/// Couples every pair of next-step laws by plain OT on `c`, ignoring what
/// happens after the first step.
pub fn one_step_otc_baseline(g1: &Network, g2: &Network, cost: &CostMatrix) -> Result<OtcSolution> {
    let (p, q) = kernels_for(g1, g2, cost)?;
    one_step_otc_kernels(&p, &q, cost.values())
}

pub fn one_step_otc_kernels(p: &MarkovKernel, q: &MarkovKernel, cost: &DMatrix<f64>) -> Result<OtcSolution> {
    check_kernel_inputs(p, q, cost)?;
    let grids = Grids::new(p, q);
    let c = state_cost(cost);
    let rows = (0..grids.states())
        .map(|s| {
            let (supply, demand) = grids.marginals(s);
            let sol = transport::solve(&supply, &demand, &grids.local(s, &c), None, None);
            grids.sparse_row(s, &sol.flow)
        })
        .collect();
    let coupling = finish(p.n(), q.n(), rows, &c)?;
    let rho = coupling.expected_cost(cost);
    let diagnostics = Diagnostics {
        solver: SolverTag::OneStepBaseline,
        iterations: 1,
        objective_history: vec![rho],
        sinkhorn_residual: None,
    };
    Ok(OtcSolution::new(coupling, cost, diagnostics))
}

/// OT between the two stationary distributions only.
pub fn marginal_ot(g1: &Network, g2: &Network, cost: &CostMatrix) -> Result<(Coupling, f64)> {
    let (p, q) = kernels_for(g1, g2, cost)?;
    let pl = p.stationary_distribution()?;
    let ql = q.stationary_distribution()?;
    ot_exact(pl.probs(), ql.probs(), cost.values())
}
