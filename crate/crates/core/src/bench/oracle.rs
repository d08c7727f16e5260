use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::CostMatrix;
use crate::error::Result;
use crate::generators::random_strongly_connected;
use crate::otc::{solve_exact_otc, solve_lp_oracle};

/// Agreement threshold between policy iteration and the LP.
pub const ORACLE_TOL: f64 = 1e-7;

/// Outcome of [`oracle_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub trials: usize,
    pub mismatches: usize,
    pub max_gap: f64,
    /// Seeds of the mismatching instances.
    pub failing_seeds: Vec<u64>,
}

/// Compares ExactOTC with the LP oracle on random strongly connected pairs
/// with `2 ≤ |U|, |V| ≤ 4` and uniform `[0, 1)` costs.
pub fn oracle_check(trials: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        trials,
        mismatches: 0,
        max_gap: 0.0,
        failing_seeds: Vec::new(),
    };
    for _ in 0..trials {
        let s: u64 = rng.random();
        let mut inst = ChaCha8Rng::seed_from_u64(s);
        let n1 = inst.random_range(2..=4);
        let n2 = inst.random_range(2..=4);
        let directed = inst.random_bool(0.5);
        let g1 = random_strongly_connected(n1, directed, 0.3, inst.random())?;
        let g2 = random_strongly_connected(n2, directed, 0.3, inst.random())?;
        let cost = CostMatrix::custom(DMatrix::from_fn(n1, n2, |_, _| inst.random::<f64>()))?;
        let exact = solve_exact_otc(&g1, &g2, &cost)?.rho;
        let lp = solve_lp_oracle(&g1, &g2, &cost)?.rho;
        let gap = (exact - lp).abs();
        report.max_gap = report.max_gap.max(gap);
        if gap > ORACLE_TOL {
            report.mismatches += 1;
            report.failing_seeds.push(s);
        }
    }
    Ok(report)
}
