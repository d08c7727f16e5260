use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{align, trial_seeds, BenchResult, BenchSolver, TrialRecord};
use crate::cost::degree_cost;
use crate::error::{Error, Result};
use crate::generators::{permuted_copy, GeneratorSpec};
use crate::network::{DegreeMode, Network};
use crate::otc::hard_alignment;

/// Draws skipped for disconnection before a run gives up, per trial.
const DRAWS_PER_TRIAL: usize = 100;

/// Verdict on a hard alignment between isomorphic networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IsomorphismVerdict {
    /// `ψ` is an isomorphism.
    pub success: bool,
    /// `ψ` equals the planted permutation.
    pub matches_truth: bool,
}

/// Whether `ψ = argmax_v π_v(·, v)` is a bijection under which every edge
/// of `G₁` maps to an edge of `G₂` of equal weight and vice versa.
pub fn isomorphism_success(g1: &Network, g2: &Network, pi_v: &DMatrix<f64>) -> bool {
    let n = g1.n();
    if g2.n() != n || pi_v.shape() != (n, n) {
        return false;
    }
    let psi = hard_alignment(pi_v);
    let mut inverse = vec![usize::MAX; n];
    for (u, &v) in psi.iter().enumerate() {
        if inverse[v] != usize::MAX {
            return false;
        }
        inverse[v] = u;
    }
    let forward = g1.edges().all(|(a, b, w)| g2.weight(psi[a], psi[b]) == w);
    let backward = g2.edges().all(|(a, b, w)| g1.weight(inverse[a], inverse[b]) == w);
    forward && backward
}

/// [`isomorphism_success`] together with the stricter `ψ = φ` check.
pub fn isomorphism_verdict(g1: &Network, g2: &Network, phi: &[usize], pi_v: &DMatrix<f64>) -> IsomorphismVerdict {
    IsomorphismVerdict {
        success: isomorphism_success(g1, g2, pi_v),
        matches_truth: hard_alignment(pi_v) == phi,
    }
}

/// Success rate of recovering a planted isomorphism with the raw squared
/// degree-difference cost. Disconnected draws are skipped and do not count
/// as trials. `value` is the three-condition success, `secondary` the
/// `ψ = φ` rate.
pub fn run_isomorphism_bench(spec: &GeneratorSpec, trials: usize, solver: BenchSolver, seed: u64) -> Result<BenchResult> {
    spec.validate()?;
    let mut inputs = Vec::with_capacity(trials);
    let mut seeds = trial_seeds(seed);
    let mut draws = 0;
    while inputs.len() < trials {
        if draws == DRAWS_PER_TRIAL * trials.max(1) {
            return Err(Error::GenerationFailed { attempts: draws });
        }
        draws += 1;
        let s = seeds.next().expect("infinite stream");
        let g1 = spec.generate(s)?;
        if g1.edge_count() == 0 || !g1.is_strongly_connected() {
            continue;
        }
        let (g2, phi) = permuted_copy(&g1, s.wrapping_add(1))?;
        inputs.push((s, g1, g2, phi));
    }
    let records = inputs
        .into_par_iter()
        .enumerate()
        .map(|(trial, (s, g1, g2, phi))| {
            let cost = degree_cost(&g1, &g2, false, DegreeMode::Out)?;
            let a = align(&g1, &g2, &cost, solver)?;
            let verdict = isomorphism_verdict(&g1, &g2, &phi, &a.vertex);
            let pct = |b: bool| if b { 100.0 } else { 0.0 };
            Ok(TrialRecord {
                trial,
                seed: s,
                value: pct(verdict.success),
                secondary: Some(pct(verdict.matches_truth)),
                rho: a.rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchResult::from_records("isomorphism", solver, records))
}
