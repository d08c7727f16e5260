use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{align, trial_seeds, BenchResult, BenchSolver, TrialRecord};
use crate::cost::degree_cost;
use crate::error::{Error, Result};
use crate::generators::{gen_sbm, WithinProbability};
use crate::network::DegreeMode;
use crate::otc::EdgeMass;

/// Two SBMs with the same block probabilities and different block sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbmBenchSpec {
    pub sizes1: Vec<usize>,
    pub sizes2: Vec<usize>,
    pub p_within: Vec<f64>,
    pub p_between: f64,
}

impl Default for SbmBenchSpec {
    /// Four blocks of 12 against four blocks of 8, within-block probabilities
    /// `1, 0.8, 0.6, 0.4` and between-block probability `0.1`.
    fn default() -> Self {
        SbmBenchSpec {
            sizes1: vec![12; 4],
            sizes2: vec![8; 4],
            p_within: vec![1.0, 0.8, 0.6, 0.4],
            p_between: 0.1,
        }
    }
}

fn corresponding(labels1: &[usize], labels2: &[usize], probs: &[f64], u: usize, v: usize) -> bool {
    probs[labels1[u]] == probs[labels2[v]]
}

fn check_labels(pi_v: &DMatrix<f64>, labels1: &[usize], labels2: &[usize], probs: &[f64]) -> Result<()> {
    if labels1.len() != pi_v.nrows() || labels2.len() != pi_v.ncols() {
        return Err(Error::LabelMismatch(format!(
            "{}×{} labels for a {}×{} alignment",
            labels1.len(),
            labels2.len(),
            pi_v.nrows(),
            pi_v.ncols()
        )));
    }
    if let Some(&b) = labels1.iter().chain(labels2).find(|&&b| b >= probs.len()) {
        return Err(Error::LabelMismatch(format!("block {b} has no connection probability")));
    }
    Ok(())
}

/// Mass of `π_v` on vertex pairs in corresponding blocks, and of `π_e` on
/// edge pairs whose endpoints both lie in corresponding blocks. Blocks
/// correspond when their within-block probabilities `probs[block]` agree.
///
/// Without a native edge alignment, `π_e = π_v ⊗ π_v` is used, whose
/// accuracy is the square of the vertex accuracy.
pub fn sbm_alignment_accuracy(
    pi_v: &DMatrix<f64>,
    pi_e: Option<&[EdgeMass]>,
    labels1: &[usize],
    labels2: &[usize],
    probs: &[f64],
) -> Result<(f64, f64)> {
    check_labels(pi_v, labels1, labels2, probs)?;
    let ok = |u, v| corresponding(labels1, labels2, probs, u, v);
    let mut vertex = 0.0;
    for u in 0..pi_v.nrows() {
        for v in 0..pi_v.ncols() {
            if ok(u, v) {
                vertex += pi_v[(u, v)];
            }
        }
    }
    let edge = match pi_e {
        Some(edges) => edges
            .iter()
            .filter(|e| ok(e.edge1.0, e.edge2.0) && ok(e.edge1.1, e.edge2.1))
            .map(|e| e.mass)
            .sum(),
        None => product_edge_accuracy(vertex),
    };
    Ok((vertex, edge))
}

/// Edge accuracy of the product alignment `π_v(u,v)·π_v(u',v')`.
pub fn product_edge_accuracy(vertex_accuracy: f64) -> f64 {
    vertex_accuracy * vertex_accuracy
}

/// Block alignment between two SBMs under the standardized degree cost.
/// `value` is vertex accuracy and `secondary` edge accuracy, in percent.
/// Draws whose networks are disconnected are skipped.
pub fn run_sbm_bench(spec: &SbmBenchSpec, trials: usize, solver: BenchSolver, seed: u64) -> Result<BenchResult> {
    let mut seeds = trial_seeds(seed);
    let mut inputs = Vec::with_capacity(trials);
    let mut draws = 0;
    while inputs.len() < trials {
        if draws == 100 * trials.max(1) {
            return Err(Error::GenerationFailed { attempts: draws });
        }
        draws += 1;
        let s = seeds.next().expect("infinite stream");
        let within = WithinProbability::PerBlock(spec.p_within.clone());
        let (g1, l1) = gen_sbm(&spec.sizes1, within.clone(), spec.p_between, s)?;
        let (g2, l2) = gen_sbm(&spec.sizes2, within, spec.p_between, s.wrapping_add(1))?;
        if g1.is_strongly_connected() && g2.is_strongly_connected() {
            inputs.push((s, g1, l1, g2, l2));
        }
    }
    let records = inputs
        .into_par_iter()
        .enumerate()
        .map(|(trial, (s, g1, l1, g2, l2))| {
            let cost = degree_cost(&g1, &g2, true, DegreeMode::Out)?;
            let a = align(&g1, &g2, &cost, solver)?;
            let (vertex, edge) = sbm_alignment_accuracy(&a.vertex, a.edge.as_deref(), &l1, &l2, &spec.p_within)?;
            Ok(TrialRecord {
                trial,
                seed: s,
                value: 100.0 * vertex,
                secondary: Some(100.0 * edge),
                rho: a.rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchResult::from_records("sbm_alignment", solver, records))
}
