//! Experiment protocols: isomorphism recovery, SBM block alignment, factor
//! alignment and k-nearest-neighbour classification.
//!
//! Every run is a deterministic function of its parameters and seed. Trial
//! inputs are drawn sequentially from a master stream; solves run in parallel
//! and are merged back in trial order.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::CostMatrix;
use crate::error::Result;
use crate::network::Network;
use crate::otc::{marginal_ot, one_step_otc_baseline, solve_entropic_otc, solve_exact_otc, EdgeMass, EntropicParams};

mod factor;
mod isomorphism;
mod knn;
mod oracle;
mod sbm;

pub use factor::{run_factor_bench, FactorBenchOptions, FACTOR_BLOCKS, FACTOR_PER_BLOCK};
pub use isomorphism::{isomorphism_success, isomorphism_verdict, run_isomorphism_bench, IsomorphismVerdict};
pub use knn::{distance_matrix, knn_classify, KnnResult};
pub use oracle::{oracle_check, OracleReport, ORACLE_TOL};
pub use sbm::{product_edge_accuracy, run_sbm_bench, sbm_alignment_accuracy, SbmBenchSpec};

/// Method used to produce a vertex alignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum BenchSolver {
    Exact,
    Entropic(EntropicParams),
    OneStep,
    /// OT between stationary distributions only.
    MarginalOt,
}

impl BenchSolver {
    pub fn name(&self) -> &'static str {
        match self {
            BenchSolver::Exact => "exact",
            BenchSolver::Entropic(_) => "entropic",
            BenchSolver::OneStep => "onestep",
            BenchSolver::MarginalOt => "ot",
        }
    }
}

/// Soft alignment returned by any [`BenchSolver`].
#[derive(Debug, Clone)]
pub struct Alignment {
    pub rho: f64,
    pub vertex: DMatrix<f64>,
    /// Native edge alignment; `None` for the marginal-OT baseline.
    pub edge: Option<Vec<EdgeMass>>,
}

/// Runs `solver` on one pair.
pub fn align(g1: &Network, g2: &Network, cost: &CostMatrix, solver: BenchSolver) -> Result<Alignment> {
    let sol = match solver {
        BenchSolver::Exact => solve_exact_otc(g1, g2, cost)?,
        BenchSolver::Entropic(params) => solve_entropic_otc(g1, g2, cost, params)?,
        BenchSolver::OneStep => one_step_otc_baseline(g1, g2, cost)?,
        BenchSolver::MarginalOt => {
            let (plan, rho) = marginal_ot(g1, g2, cost)?;
            return Ok(Alignment {
                rho,
                vertex: plan.into_plan(),
                edge: None,
            });
        }
    };
    Ok(Alignment {
        rho: sol.rho,
        vertex: sol.vertex_alignment,
        edge: Some(sol.edge_alignment),
    })
}

/// One trial of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Seed of the generator call that produced the trial's input.
    pub seed: u64,
    /// Primary score in percent.
    pub value: f64,
    /// Secondary score in percent, where the protocol has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
    pub rho: f64,
}

/// Per-trial records of a benchmark with their mean and sample standard
/// deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub experiment: String,
    pub solver: &'static str,
    pub records: Vec<TrialRecord>,
    pub mean: f64,
    pub sd: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary_sd: Option<f64>,
}

impl BenchResult {
    pub fn from_records(experiment: impl Into<String>, solver: BenchSolver, records: Vec<TrialRecord>) -> Self {
        let values: Vec<f64> = records.iter().map(|r| r.value).collect();
        let (mean, sd) = mean_sd(&values);
        let secondary: Option<Vec<f64>> = records.iter().map(|r| r.secondary).collect();
        let (secondary_mean, secondary_sd) = match secondary {
            Some(s) if !s.is_empty() => {
                let (m, d) = mean_sd(&s);
                (Some(m), Some(d))
            }
            _ => (None, None),
        };
        BenchResult {
            experiment: experiment.into(),
            solver: solver.name(),
            records,
            mean,
            sd,
            secondary_mean,
            secondary_sd,
        }
    }
}

/// Mean and sample (`n − 1`) standard deviation; the deviation of fewer
/// than two values is `0`.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Independent per-trial seeds drawn from a master stream.
pub(crate) fn trial_seeds(seed: u64) -> impl Iterator<Item = u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || rng.random())
}
