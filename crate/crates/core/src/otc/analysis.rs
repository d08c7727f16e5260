//! Post-hoc checks and readouts of a solved coupling.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{OtcSolution, TransitionCoupling};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::ot::ot_exact;

/// `E c_k` of the stationary coupling, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultistepCost {
    /// `⟨λ, c⟩`, which equals `E c_k` for every `k` by stationarity.
    pub direct: f64,
    /// `k⁻¹ Σ_{j<k} ⟨λRʲ, c⟩`.
    pub unrolled: f64,
}

/// Expected `k`-step average cost of a solution's stationary coupling.
pub fn multistep_average_cost(solution: &OtcSolution, cost: &DMatrix<f64>, k: usize) -> Result<MultistepCost> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let coupling = &solution.coupling;
    check_cost_shape(coupling, cost)?;
    let direct = coupling.expected_cost(cost);
    let mut law = coupling.stationary_law().to_vec();
    let mut total = 0.0;
    for step in 0..k {
        total += weighted_cost(coupling, &law, cost);
        if step + 1 < k {
            law = push_forward(coupling, &law);
        }
    }
    Ok(MultistepCost {
        direct,
        unrolled: total / k as f64,
    })
}

fn check_cost_shape(coupling: &TransitionCoupling, cost: &DMatrix<f64>) -> Result<()> {
    let (n1, n2) = coupling.dims();
    if cost.shape() != (n1, n2) {
        return Err(Error::DimensionMismatch {
            expected: n1 * n2,
            found: cost.len(),
        });
    }
    Ok(())
}

fn weighted_cost(coupling: &TransitionCoupling, law: &[f64], cost: &DMatrix<f64>) -> f64 {
    law.iter()
        .enumerate()
        .map(|(s, l)| {
            let (u, v) = coupling.pair(s);
            l * cost[(u, v)]
        })
        .sum()
}

fn push_forward(coupling: &TransitionCoupling, law: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; law.len()];
    for (s, &l) in law.iter().enumerate() {
        for &(t, r) in coupling.row(s) {
            next[t] += l * r;
        }
    }
    next
}

/// Empirical average of `c` along one trajectory of `steps` transitions
/// started from `λ`.
pub fn simulate_average_cost(coupling: &TransitionCoupling, cost: &DMatrix<f64>, steps: usize, seed: u64) -> Result<f64> {
    check_cost_shape(coupling, cost)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial: Vec<(usize, f64)> = coupling
        .stationary_law()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .collect();
    let mut state = sample(&initial, rng.random());
    let mut total = 0.0;
    for _ in 0..steps {
        let (u, v) = coupling.pair(state);
        total += cost[(u, v)];
        state = sample(coupling.row(state), rng.random());
    }
    Ok(total / steps as f64)
}

fn sample(dist: &[(usize, f64)], x: f64) -> usize {
    let mut acc = 0.0;
    for &(t, p) in dist {
        acc += p;
        if x < acc {
            return t;
        }
    }
    dist.last().expect("nonempty distribution").0
}

/// Right-hand sides of the degree, weight and marginal-OT lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub rho: f64,
    /// `(1/2D) Σ_u |d₁(u) − d₂(u)|`.
    pub degree_bound: f64,
    /// `(1/4D) Σ_{u,u'} |w₁(u,u') − w₂(u,u')|`.
    pub weight_bound: f64,
    /// OT cost between the stationary distributions.
    pub marginal_ot_bound: f64,
    /// Whether `ρ` clears all three bounds up to `1e-9`.
    pub holds: bool,
}

/// Checks `ρ` against the local lower bounds for two undirected networks on
/// a common vertex set with equal total degree under zero-one cost.
pub fn verify_lower_bounds(g1: &Network, g2: &Network, cost: &CostMatrix, solution: &OtcSolution) -> Result<LowerBoundReport> {
    let n = g1.n();
    if g1.is_directed() || g2.is_directed() {
        return Err(Error::PreconditionViolated("both networks must be undirected".into()));
    }
    if g2.n() != n {
        return Err(Error::PreconditionViolated("networks must share a vertex set".into()));
    }
    let d = g1.total_degree();
    if (d - g2.total_degree()).abs() > 1e-9 * d {
        return Err(Error::PreconditionViolated(format!(
            "total degrees differ: {d} vs {}",
            g2.total_degree()
        )));
    }
    let zero_one = crate::cost::zero_one_identity(n);
    if cost.values() != zero_one.values() {
        return Err(Error::PreconditionViolated("cost must be the zero-one identity cost".into()));
    }
    let d1 = g1.degrees();
    let d2 = g2.degrees();
    let degree_bound = d1.iter().zip(&d2).map(|(a, b)| (a - b).abs()).sum::<f64>() / (2.0 * d);
    let weight_bound = (g1.weights() - g2.weights()).abs().sum() / (4.0 * d);
    let p: Vec<f64> = d1.iter().map(|x| x / d).collect();
    let q: Vec<f64> = d2.iter().map(|x| x / d).collect();
    let (_, marginal_ot_bound) = ot_exact(&p, &q, cost.values())?;
    let rho = solution.rho;
    let holds = [degree_bound, weight_bound, marginal_ot_bound]
        .iter()
        .all(|b| rho >= b - 1e-9);
    Ok(LowerBoundReport {
        rho,
        degree_bound,
        weight_bound,
        marginal_ot_bound,
        holds,
    })
}

/// `ψ(u) = argmax_v π(u, v)`, ties to the lowest index.
pub fn hard_alignment(pi: &DMatrix<f64>) -> Vec<usize> {
    (0..pi.nrows())
        .map(|u| {
            let mut best = 0;
            for v in 1..pi.ncols() {
                if pi[(u, v)] > pi[(u, best)] {
                    best = v;
                }
            }
            best
        })
        .collect()
}
