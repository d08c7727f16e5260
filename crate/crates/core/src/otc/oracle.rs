//! Linear program over edge-occupation measures.
//!
//! Independent of the policy-iteration machinery: it shares only the kernel
//! supports and the dense simplex in [`crate::lp`].

use nalgebra::DMatrix;

use super::{check_kernel_inputs, kernels_for, state_cost, Diagnostics, Grids, OtcSolution, SolverTag, TransitionCoupling};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::lp;
use crate::markov::MarkovKernel;
use crate::network::Network;

/// Largest `|U|·|V|` accepted by the oracle.
pub const LP_ORACLE_STATE_LIMIT: usize = 64;

/// Globally optimal OTC value by a single LP.
pub fn solve_lp_oracle(g1: &Network, g2: &Network, cost: &CostMatrix) -> Result<OtcSolution> {
    let (p, q) = kernels_for(g1, g2, cost)?;
    lp_oracle_kernels(&p, &q, cost.values())
}

pub fn lp_oracle_kernels(p: &MarkovKernel, q: &MarkovKernel, cost: &DMatrix<f64>) -> Result<OtcSolution> {
    let states = p.n() * q.n();
    if states > LP_ORACLE_STATE_LIMIT {
        return Err(Error::InstanceTooLarge {
            states,
            limit: LP_ORACLE_STATE_LIMIT,
        });
    }
    check_kernel_inputs(p, q, cost)?;
    let grids = Grids::new(p, q);
    let c = state_cost(cost);

    // Variable x(s, s') for every s and every s' in the product support of s.
    let mut offset = Vec::with_capacity(states + 1);
    offset.push(0);
    for s in 0..states {
        let (a, b) = grids.sides(s);
        offset.push(offset[s] + a.len() * b.len());
    }
    let vars = offset[states];

    let mut constraints: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    // Flow conservation: inflow(t) − outflow(t) = 0.
    let mut balance: Vec<Vec<(usize, f64)>> = vec![Vec::new(); states];
    for s in 0..states {
        for k in 0..offset[s + 1] - offset[s] {
            let t = grids.target(s, k);
            balance[t].push((offset[s] + k, 1.0));
            balance[s].push((offset[s] + k, -1.0));
        }
    }
    constraints.extend(balance.into_iter().map(|row| (row, 0.0)));
    constraints.push(((0..vars).map(|j| (j, 1.0)).collect(), 1.0));
    // Marginals: Σ_v' x(s; u',v') = P(u'|u)·m(s) and the symmetric condition.
    for s in 0..states {
        let (a, b) = grids.sides(s);
        let nb = b.len();
        let all: Vec<usize> = (offset[s]..offset[s + 1]).collect();
        for (i, &(_, pu)) in a.iter().enumerate() {
            let mut row: Vec<(usize, f64)> = all.iter().map(|&j| (j, -pu)).collect();
            for jj in 0..nb {
                row[i * nb + jj].1 += 1.0;
            }
            constraints.push((row, 0.0));
        }
        for (jj, &(_, qv)) in b.iter().enumerate() {
            let mut row: Vec<(usize, f64)> = all.iter().map(|&j| (j, -qv)).collect();
            for i in 0..a.len() {
                row[i * nb + jj].1 += 1.0;
            }
            constraints.push((row, 0.0));
        }
    }

    let mut a = DMatrix::zeros(constraints.len(), vars);
    let mut rhs = Vec::with_capacity(constraints.len());
    for (r, (row, b)) in constraints.into_iter().enumerate() {
        for (j, v) in row {
            a[(r, j)] += v;
        }
        rhs.push(b);
    }
    let mut objective = vec![0.0; vars];
    for s in 0..states {
        objective[offset[s]..offset[s + 1]].iter_mut().for_each(|o| *o = c[s]);
    }
    let sol = lp::minimize(&a, &rhs, &objective)?;

    let mut law = vec![0.0; states];
    let mut rows = Vec::with_capacity(states);
    for s in 0..states {
        let x = &sol.x[offset[s]..offset[s + 1]];
        let m: f64 = x.iter().sum();
        law[s] = m;
        if m > 1e-12 {
            let plan: Vec<f64> = x.iter().map(|v| v / m).collect();
            rows.push(grids.sparse_row(s, &plan));
        } else {
            rows.push(grids.sparse_row(s, &grids.independent_plan(s)));
        }
    }
    let total: f64 = law.iter().sum();
    law.iter_mut().for_each(|l| *l /= total);
    let coupling = TransitionCoupling::from_parts(p.n(), q.n(), rows, law)?;
    let diagnostics = Diagnostics {
        solver: SolverTag::LpOracle,
        iterations: 1,
        objective_history: vec![sol.objective],
        sinkhorn_residual: None,
    };
    Ok(OtcSolution::new(coupling, cost, diagnostics))
}
