//! Optimal transition couplings between two random walks.
//!
//! Every solver returns an [`OtcSolution`]: the cost `ρ = ⟨λ, c⟩` of a
//! stationary transition coupling `(R, λ)`, with `λ` read as a soft vertex
//! alignment and `λ(u,v)·R(u',v'|u,v)` as a soft edge alignment.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::network::Network;

mod analysis;
mod baseline;
mod coupling;
mod entropic;
pub(crate) mod evaluate;
mod exact;
mod oracle;

pub use analysis::{
    hard_alignment, multistep_average_cost, simulate_average_cost, verify_lower_bounds, LowerBoundReport,
    MultistepCost,
};
pub use baseline::{marginal_ot, one_step_otc_baseline, one_step_otc_kernels};
pub use coupling::{independent_coupling, EdgeMass, TransitionCoupling};
pub(crate) use coupling::independent_row;
pub use entropic::{entropic_otc_kernels, solve_entropic_otc, EntropicParams};
pub use exact::{exact_otc_kernels, solve_exact_otc, solve_exact_otc_with, ExactParams};
pub use oracle::{lp_oracle_kernels, solve_lp_oracle, LP_ORACLE_STATE_LIMIT};

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Exact,
    Entropic,
    LpOracle,
    OneStepBaseline,
}

/// Solver bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub solver: SolverTag,
    pub iterations: usize,
    /// `ρ` of the coupling held after each iteration.
    pub objective_history: Vec<f64>,
    /// Largest Sinkhorn marginal residual of the last sweep (entropic only).
    pub sinkhorn_residual: Option<f64>,
}

/// Output of an OTC solver.
#[derive(Debug, Clone)]
pub struct OtcSolution {
    pub rho: f64,
    pub coupling: TransitionCoupling,
    /// `π_v(u,v) = λ(u,v)`.
    pub vertex_alignment: DMatrix<f64>,
    /// `π_e((u,u'),(v,v')) = λ(u,v)·R(u',v'|u,v)`.
    pub edge_alignment: Vec<EdgeMass>,
    pub diagnostics: Diagnostics,
}

impl OtcSolution {
    pub(crate) fn new(coupling: TransitionCoupling, cost: &DMatrix<f64>, diagnostics: Diagnostics) -> Self {
        OtcSolution {
            rho: coupling.expected_cost(cost),
            vertex_alignment: coupling.vertex_alignment(),
            edge_alignment: coupling.edge_alignment(),
            coupling,
            diagnostics,
        }
    }
}

/// Kernels of two strongly connected networks, checked against the cost shape.
pub(crate) fn kernels_for(g1: &Network, g2: &Network, cost: &CostMatrix) -> Result<(MarkovKernel, MarkovKernel)> {
    if cost.rows() != g1.n() || cost.cols() != g2.n() {
        return Err(Error::DimensionMismatch {
            expected: g1.n() * g2.n(),
            found: cost.rows() * cost.cols(),
        });
    }
    if !g1.is_strongly_connected() || !g2.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    Ok((g1.transition_kernel()?, g2.transition_kernel()?))
}

pub(crate) fn check_kernel_inputs(p: &MarkovKernel, q: &MarkovKernel, cost: &DMatrix<f64>) -> Result<()> {
    if cost.shape() != (p.n(), q.n()) {
        return Err(Error::DimensionMismatch {
            expected: p.n() * q.n(),
            found: cost.len(),
        });
    }
    if !p.is_irreducible() || !q.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    Ok(())
}

/// Per-state product grids `supp P(·|u) × supp Q(·|v)`.
#[derive(Debug, Clone)]
pub(crate) struct Grids {
    pub n2: usize,
    pub p_support: Vec<Vec<(usize, f64)>>,
    pub q_support: Vec<Vec<(usize, f64)>>,
}

impl Grids {
    pub fn new(p: &MarkovKernel, q: &MarkovKernel) -> Self {
        Grids {
            n2: q.n(),
            p_support: (0..p.n()).map(|u| p.support(u)).collect(),
            q_support: (0..q.n()).map(|v| q.support(v)).collect(),
        }
    }

    pub fn states(&self) -> usize {
        self.p_support.len() * self.n2
    }

    pub fn sides(&self, s: usize) -> (&[(usize, f64)], &[(usize, f64)]) {
        (&self.p_support[s / self.n2], &self.q_support[s % self.n2])
    }

    /// Target state of local cell `k` of state `s`.
    pub fn target(&self, s: usize, k: usize) -> usize {
        let (a, b) = self.sides(s);
        a[k / b.len()].0 * self.n2 + b[k % b.len()].0
    }

    /// Values of a state function on the local grid of `s`.
    pub fn local(&self, s: usize, f: &[f64]) -> Vec<f64> {
        let (a, b) = self.sides(s);
        a.iter()
            .flat_map(|&(x, _)| b.iter().map(move |&(y, _)| f[x * self.n2 + y]))
            .collect()
    }

    /// Row marginal and a column marginal rescaled to the same total.
    pub fn marginals(&self, s: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.sides(s);
        let supply: Vec<f64> = a.iter().map(|&(_, p)| p).collect();
        let demand: Vec<f64> = b.iter().map(|&(_, q)| q).collect();
        let ratio = supply.iter().sum::<f64>() / demand.iter().sum::<f64>();
        (supply, demand.into_iter().map(|d| d * ratio).collect())
    }

    pub fn independent_plan(&self, s: usize) -> Vec<f64> {
        let (a, b) = self.sides(s);
        a.iter().flat_map(|&(_, p)| b.iter().map(move |&(_, q)| p * q)).collect()
    }

    pub fn sparse_row(&self, s: usize, plan: &[f64]) -> Vec<(usize, f64)> {
        plan.iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(k, &x)| (self.target(s, k), x))
            .collect()
    }

    pub fn sparse_rows(&self, plans: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        plans.iter().enumerate().map(|(s, p)| self.sparse_row(s, p)).collect()
    }
}

/// Cost matrix flattened to state order.
pub(crate) fn state_cost(cost: &DMatrix<f64>) -> Vec<f64> {
    let (n1, n2) = cost.shape();
    (0..n1 * n2).map(|s| cost[(s / n2, s % n2)]).collect()
}

/// Coupling whose law is the lowest-gain stationary law of `rows`.
pub(crate) fn finish(
    n1: usize,
    n2: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cost: &[f64],
) -> Result<TransitionCoupling> {
    let eval = evaluate::evaluate(&rows, cost)?;
    let law = eval.best_law(rows.len());
    TransitionCoupling::from_parts(n1, n2, rows, law)
}
