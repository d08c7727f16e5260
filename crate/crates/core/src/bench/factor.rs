use rayon::prelude::*;

use super::{align, trial_seeds, BenchResult, BenchSolver, TrialRecord};
use crate::cost::embedding_cost;
use crate::error::{Error, Result};
use crate::factor::{check_cost_compatible, generate_factor_pair, FactorPair, FactorPairSpec};

pub const FACTOR_BLOCKS: usize = 6;
pub const FACTOR_PER_BLOCK: usize = 5;

/// Redraws allowed per trial when only compatible pairs are accepted.
const COMPATIBLE_DRAWS: usize = 100;

/// Options of [`run_factor_bench`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorBenchOptions {
    pub epsilon: f64,
    pub trials: usize,
    /// Redraw pairs whose squared Euclidean cost is not compatible with the
    /// factor map, so every trial is a compatible-cost instance.
    pub compatible_only: bool,
}

/// Vertex alignment accuracy `100·Σ_u π_v(u, f(u))` between undirected
/// extension/factor pairs under the squared Euclidean embedding cost, one
/// result per `σ`. Every `σ` reuses the same master seed.
pub fn run_factor_bench(
    sigmas: &[f64],
    options: FactorBenchOptions,
    solver: BenchSolver,
    seed: u64,
) -> Result<Vec<BenchResult>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let spec = FactorPairSpec {
                blocks: FACTOR_BLOCKS,
                per_block: FACTOR_PER_BLOCK,
                sigma,
                directed: false,
                epsilon: options.epsilon,
            };
            let inputs = draw_inputs(spec, options, seed)?;
            let records = inputs
                .into_par_iter()
                .enumerate()
                .map(|(trial, (s, pair))| {
                    let cost = embedding_cost(&pair.embedding1, &pair.embedding2, true)?;
                    let a = align(&pair.g1, &pair.g2, &cost, solver)?;
                    let acc: f64 = (0..pair.g1.n()).map(|u| a.vertex[(u, pair.map.apply(u))]).sum();
                    Ok(TrialRecord {
                        trial,
                        seed: s,
                        value: 100.0 * acc,
                        secondary: None,
                        rho: a.rho,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let tag = if options.compatible_only { " compatible" } else { "" };
            Ok(BenchResult::from_records(
                format!("factor sigma={sigma} epsilon={}{tag}", options.epsilon),
                solver,
                records,
            ))
        })
        .collect()
}

fn draw_inputs(spec: FactorPairSpec, options: FactorBenchOptions, seed: u64) -> Result<Vec<(u64, FactorPair)>> {
    let mut seeds = trial_seeds(seed);
    let mut inputs = Vec::with_capacity(options.trials);
    let mut draws = 0;
    while inputs.len() < options.trials {
        if draws == COMPATIBLE_DRAWS * options.trials {
            return Err(Error::GenerationFailed { attempts: draws });
        }
        draws += 1;
        let s = seeds.next().expect("infinite stream");
        let pair = generate_factor_pair(spec, s)?;
        if options.compatible_only {
            let cost = embedding_cost(&pair.embedding1, &pair.embedding2, true)?;
            if !check_cost_compatible(cost.values(), &pair.map) {
                continue;
            }
        }
        inputs.push((s, pair));
    }
    Ok(inputs)
}
