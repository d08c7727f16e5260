//! Revised two-phase simplex for small equality-form linear programs.
//!
//! Only used as an independent check on the policy-iteration solver, so it
//! favours robustness over speed: an explicit dense basis inverse that is
//! rebuilt from the original data every few pivots, and artificial variables
//! that are kept at zero (rather than removed) so redundant equality rows need
//! no special treatment.
//!
//! Degeneracy is handled by solving with `b + Aξ` for a small random `ξ > 0`,
//! which stays feasible whenever the original problem is, and then reading
//! the final basis against the original `b`. Dantzig pricing falls back to
//! Bland's rule after a run of degenerate pivots as a second line of defence.

use nalgebra::{DMatrix, DVector};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const PRICE_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_PATIENCE: usize = 50;
const REFACTOR_EVERY: usize = 32;
const PERTURBATION: f64 = 1e-8;

/// Optimal point of `min cᵀx` subject to `Ax = b`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Revised {
    /// Rows sign-flipped so that `b ≥ 0`; artificial column `n + i` is `e_i`.
    a: DMatrix<f64>,
    b: DVector<f64>,
    n: usize,
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    since_refactor: usize,
}

impl Revised {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.n {
            self.a.column(j).clone_owned()
        } else {
            let mut e = DVector::zeros(self.m());
            e[j - self.n] = 1.0;
            e
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m();
        let mut bm = DMatrix::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        self.binv = bm
            .try_inverse()
            .ok_or_else(|| Error::LinearProgram("basis became singular".into()))?;
        self.since_refactor = 0;
        Ok(())
    }

    /// Swaps column `q` into basis position `r`, given `w = B⁻¹A_q`.
    fn replace(&mut self, r: usize, q: usize, w: &DVector<f64>) {
        let m = self.m();
        let pivot_row = self.binv.row(r) / w[r];
        for k in 0..m {
            if k != r && w[k] != 0.0 {
                let f = w[k];
                let mut row = self.binv.row_mut(k);
                row -= &pivot_row * f;
            }
        }
        self.binv.set_row(r, &pivot_row);
        self.basis[r] = q;
        self.since_refactor += 1;
    }

    /// Dual simplex pivots from a dual-feasible basis until the basic
    /// solution is also primal feasible.
    fn restore_feasibility(&mut self, cost: &[f64], enter: usize, cap: usize) -> Result<()> {
        let m = self.m();
        for _ in 0..cap {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let x = self.basic_values();
            let Some(r) = (0..m)
                .filter(|&k| x[k] < -1e-13)
                .min_by(|&a, &b| x[a].total_cmp(&x[b]))
            else {
                return Ok(());
            };
            let cb = DVector::from_fn(m, |k, _| cost[self.basis[k]]);
            let y = self.binv.tr_mul(&cb);
            let row = self.binv.row(r).clone_owned();
            let mut q = None;
            let mut best = f64::INFINITY;
            for j in 0..enter {
                if self.basis.contains(&j) {
                    continue;
                }
                let alpha = (&row * self.a.column(j))[0];
                if alpha < -PIVOT_TOL {
                    let d = (cost[j] - self.a.column(j).dot(&y)).max(0.0);
                    let t = d / -alpha;
                    if t < best {
                        best = t;
                        q = Some(j);
                    }
                }
            }
            let Some(q) = q else {
                return Err(Error::LinearProgram("infeasible after perturbation removal".into()));
            };
            let w = &self.binv * self.column(q);
            self.replace(r, q, &w);
        }
        Err(Error::LinearProgram("pivot limit reached".into()))
    }

    fn basic_values(&self) -> DVector<f64> {
        &self.binv * &self.b
    }

    /// Minimizes `cost` (indexed over structural then artificial columns),
    /// letting only columns below `enter` join the basis.
    fn optimize(&mut self, cost: &[f64], enter: usize, pin_artificials: bool, cap: usize) -> Result<()> {
        let m = self.m();
        let mut degenerate = 0usize;
        let mut in_basis = vec![false; self.n + m];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        for _ in 0..cap {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let bland = degenerate >= DEGENERATE_PATIENCE;
            let cb = DVector::from_fn(m, |k, _| cost[self.basis[k]]);
            let y = self.binv.tr_mul(&cb);
            let mut q = None;
            let mut best = -PRICE_TOL;
            for j in 0..enter {
                if in_basis[j] {
                    continue;
                }
                let d = cost[j] - self.a.column(j).dot(&y);
                if d < best {
                    q = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = q else {
                return Ok(());
            };
            let w = &self.binv * self.column(q);
            let x = self.basic_values();
            // In phase two artificials are pinned at zero: any nonzero entry
            // blocks the step.
            let ratio_of = |k: usize| -> Option<f64> {
                if pin_artificials && self.basis[k] >= self.n && w[k].abs() > PIVOT_TOL {
                    Some(0.0)
                } else if w[k] > PIVOT_TOL {
                    Some(x[k].max(0.0) / w[k])
                } else {
                    None
                }
            };
            let theta = (0..m).filter_map(ratio_of).fold(f64::INFINITY, f64::min);
            if theta.is_infinite() {
                return Err(Error::LinearProgram("objective is unbounded below".into()));
            }
            let mut r: Option<usize> = None;
            for k in 0..m {
                let Some(t) = ratio_of(k) else { continue };
                if t > theta + 1e-12 {
                    continue;
                }
                let better = match r {
                    None => true,
                    Some(o) if bland => self.basis[k] < self.basis[o],
                    Some(o) => w[k].abs() > w[o].abs(),
                };
                if better {
                    r = Some(k);
                }
            }
            let r = r.expect("a blocking row exists");
            if theta <= 1e-11 {
                degenerate += 1;
            } else if !bland {
                degenerate = 0;
            }
            in_basis[self.basis[r]] = false;
            in_basis[q] = true;
            self.replace(r, q, &w);
        }
        Err(Error::LinearProgram("pivot limit reached".into()))
    }
}

/// Solves `min cᵀx` s.t. `Ax = b`, `x ≥ 0`.
pub fn minimize(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: m + n,
            found: b.len() + c.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let scale = 1.0 + b.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let xi = DVector::from_fn(n, |_, _| PERTURBATION * scale * rng.random_range(0.5..1.0));
    let original = DVector::from_column_slice(b);
    let perturbed = &original + a * xi;
    // Flip rows so that the perturbed right-hand side is nonnegative.
    let sign: Vec<f64> = perturbed.iter().map(|x| if *x < 0.0 { -1.0 } else { 1.0 }).collect();
    let a = DMatrix::from_fn(m, n, |i, j| sign[i] * a[(i, j)]);
    let b = DVector::from_fn(m, |i, _| sign[i] * original[i]);
    let perturbed = DVector::from_fn(m, |i, _| sign[i] * perturbed[i]);
    let mut lp = Revised {
        a,
        b: perturbed,
        n,
        basis: (n..n + m).collect(),
        binv: DMatrix::identity(m, m),
        since_refactor: 0,
    };
    let cap = 100 * (m + n) + 10_000;

    let mut phase_one = vec![0.0; n + m];
    phase_one[n..].iter_mut().for_each(|x| *x = 1.0);
    lp.optimize(&phase_one, n, false, cap)?;
    lp.refactor()?;
    let x = lp.basic_values();
    let infeasibility: f64 = (0..m).filter(|&k| lp.basis[k] >= n).map(|k| x[k].abs()).sum();
    if infeasibility > 1e-8 * scale {
        return Err(Error::LinearProgram(format!("infeasible (phase one residual {infeasibility})")));
    }

    let mut phase_two = vec![0.0; n + m];
    phase_two[..n].copy_from_slice(c);
    lp.optimize(&phase_two, n, true, cap)?;
    lp.b = b;
    lp.refactor()?;
    lp.restore_feasibility(&phase_two, n, cap)?;
    lp.refactor()?;
    let xb = lp.basic_values();
    let mut x = vec![0.0; n];
    for (k, &j) in lp.basis.iter().enumerate() {
        if j < n {
            x[j] = xb[k].max(0.0);
        }
    }
    let residual = (&lp.a * DVector::from_column_slice(&x) - &lp.b).amax();
    if residual > 1e-9 * scale {
        return Err(Error::LinearProgram(format!("final basis violates constraints by {residual}")));
    }
    let objective = x.iter().zip(c).map(|(x, c)| x * c).sum();
    Ok(LpSolution { x, objective })
}
