//! Discrete optimal transport between two distributions.
//!
//! [`ot_exact`] solves the transportation linear program exactly with a
//! network simplex; [`ot_sinkhorn`] solves its entropically regularized
//! counterpart in the log domain.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

mod sinkhorn;
pub(crate) mod transport;

pub(crate) use sinkhorn::{log_sinkhorn, round_to_marginals};

const MARGINAL_TOL: f64 = 1e-9;

/// A joint distribution with prescribed marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    plan: DMatrix<f64>,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl Coupling {
    pub fn plan(&self) -> &DMatrix<f64> {
        &self.plan
    }

    pub fn into_plan(self) -> DMatrix<f64> {
        self.plan
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    /// `⟨plan, cost⟩`.
    pub fn cost(&self, cost: &DMatrix<f64>) -> f64 {
        self.plan.component_mul(cost).sum()
    }

    /// Largest absolute deviation of the plan's row or column sums.
    pub fn marginal_error(&self) -> f64 {
        let (m, n) = self.plan.shape();
        let rows = (0..m).map(|i| (self.plan.row(i).sum() - self.row_marginal[i]).abs());
        let cols = (0..n).map(|j| (self.plan.column(j).sum() - self.col_marginal[j]).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Independent coupling `mu ⊗ nu`.
    pub fn independent(mu: &[f64], nu: &[f64]) -> Self {
        Coupling {
            plan: DMatrix::from_fn(mu.len(), nu.len(), |i, j| mu[i] * nu[j]),
            row_marginal: mu.to_vec(),
            col_marginal: nu.to_vec(),
        }
    }
}

fn validate(mu: &[f64], nu: &[f64], cost: &DMatrix<f64>) -> Result<()> {
    for (name, d) in [("mu", mu), ("nu", nu)] {
        if d.is_empty() {
            return Err(Error::MarginalInvalid(format!("{name} is empty")));
        }
        if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::MarginalInvalid(format!("{name} has a negative entry")));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > MARGINAL_TOL {
            return Err(Error::MarginalInvalid(format!("{name} sums to {s}")));
        }
    }
    if cost.shape() != (mu.len(), nu.len()) {
        return Err(Error::DimensionMismatch {
            expected: mu.len() * nu.len(),
            found: cost.len(),
        });
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("cost must be finite".into()));
    }
    Ok(())
}

fn positive_support(d: &[f64]) -> Vec<usize> {
    (0..d.len()).filter(|&i| d[i] > 0.0).collect()
}

fn sub_cost(cost: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| cost[(rows[i], cols[j])])
}

fn embed(sub: &DMatrix<f64>, rows: &[usize], cols: &[usize], m: usize, n: usize) -> DMatrix<f64> {
    let mut plan = DMatrix::zeros(m, n);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            plan[(i, j)] = sub[(a, b)];
        }
    }
    plan
}

/// Exact optimal coupling of `mu` and `nu` under `cost`, with its value.
///
/// Zero-mass entries are removed before solving and come back as zero rows
/// and columns of the plan.
pub fn ot_exact(mu: &[f64], nu: &[f64], cost: &DMatrix<f64>) -> Result<(Coupling, f64)> {
    validate(mu, nu, cost)?;
    let rows = positive_support(mu);
    let cols = positive_support(nu);
    let supply: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu[j]).collect();
    let ratio = supply.iter().sum::<f64>() / demand.iter().sum::<f64>();
    let demand: Vec<f64> = demand.iter().map(|d| d * ratio).collect();
    let c = sub_cost(cost, &rows, &cols);
    let flat: Vec<f64> = (0..rows.len())
        .flat_map(|i| (0..cols.len()).map(move |j| (i, j)))
        .map(|(i, j)| c[(i, j)])
        .collect();
    let sol = transport::solve(&supply, &demand, &flat, None, None);
    let sub = DMatrix::from_row_slice(rows.len(), cols.len(), &sol.flow);
    let plan = embed(&sub, &rows, &cols, mu.len(), nu.len());
    let coupling = Coupling {
        plan,
        row_marginal: mu.to_vec(),
        col_marginal: nu.to_vec(),
    };
    let value = coupling.cost(cost);
    Ok((coupling, value))
}

/// Output of [`ot_sinkhorn`].
#[derive(Debug, Clone)]
pub struct EntropicPlan {
    pub coupling: Coupling,
    /// `⟨plan, cost⟩` of the (unrounded) Sinkhorn plan.
    pub value: f64,
    /// Final L1 row-marginal residual.
    pub residual: f64,
    /// Residual after every iteration.
    pub residual_history: Vec<f64>,
}

/// Entropically regularized coupling `diag(a)·exp(−ξ·C)·diag(b)` after
/// `iters` log-domain Sinkhorn iterations.
pub fn ot_sinkhorn(
    mu: &[f64],
    nu: &[f64],
    cost: &DMatrix<f64>,
    xi: f64,
    iters: usize,
) -> Result<EntropicPlan> {
    validate(mu, nu, cost)?;
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("ξ = {xi} must be positive")));
    }
    if iters == 0 {
        return Err(Error::InvalidParameter("Sinkhorn needs at least one iteration".into()));
    }
    let rows = positive_support(mu);
    let cols = positive_support(nu);
    let sub_mu: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let sub_nu: Vec<f64> = cols.iter().map(|&j| nu[j]).collect();
    let res = log_sinkhorn(&sub_mu, &sub_nu, &sub_cost(cost, &rows, &cols), xi, iters)?;
    let plan = embed(&res.plan, &rows, &cols, mu.len(), nu.len());
    let coupling = Coupling {
        plan,
        row_marginal: mu.to_vec(),
        col_marginal: nu.to_vec(),
    };
    let value = coupling.cost(cost);
    Ok(EntropicPlan {
        coupling,
        value,
        residual: *res.residuals.last().expect("at least one iteration"),
        residual_history: res.residuals,
    })
}

/// Total variation distance `½ Σ |mu − nu|`.
pub fn total_variation(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.len(),
            found: nu.len(),
        });
    }
    Ok(0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_masses() {
        let cost = DMatrix::from_element(1, 1, 2.5);
        let (c, v) = ot_exact(&[1.0], &[1.0], &cost).unwrap();
        assert_eq!(c.plan()[(0, 0)], 1.0);
        assert_eq!(v, 2.5);
    }

    #[test]
    fn identity_cost_on_equal_marginals_is_free() {
        let mu = [0.1, 0.4, 0.0, 0.5];
        let cost = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 });
        let (c, v) = ot_exact(&mu, &mu, &cost).unwrap();
        assert!(v.abs() < 1e-15);
        assert!(c.marginal_error() < 1e-12);
        assert_eq!(c.plan().row(2).sum(), 0.0);
    }

    #[test]
    fn tv_of_point_masses() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(total_variation(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn zero_cost_sinkhorn_is_independent() {
        let mu = [0.2, 0.8];
        let nu = [0.5, 0.25, 0.25];
        let out = ot_sinkhorn(&mu, &nu, &DMatrix::zeros(2, 3), 100.0, 5).unwrap();
        let ind = Coupling::independent(&mu, &nu);
        assert!((out.coupling.plan() - ind.plan()).abs().max() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        let cost = DMatrix::zeros(2, 2);
        assert!(matches!(
            ot_exact(&[0.5, 0.6], &[0.5, 0.5], &cost),
            Err(Error::MarginalInvalid(_))
        ));
        assert!(matches!(
            ot_exact(&[-0.5, 1.5], &[0.5, 0.5], &cost),
            Err(Error::MarginalInvalid(_))
        ));
        assert!(ot_sinkhorn(&[0.5, 0.5], &[0.5, 0.5], &cost, 0.0, 10).is_err());
        assert!(ot_sinkhorn(&[0.5, 0.5], &[0.5, 0.5], &cost, 1.0, 0).is_err());
    }
}
