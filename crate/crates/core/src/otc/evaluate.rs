//! Gain and bias of a fixed joint kernel (policy evaluation).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scc::strongly_connected_components;

/// Average-cost value functions of a kernel.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    /// Long-run average cost from each state.
    pub gain: Vec<f64>,
    /// Relative value, normalized to zero mean under each class's law.
    pub bias: Vec<f64>,
    /// Recurrent classes, each sorted, ordered by lowest member.
    pub classes: Vec<Vec<usize>>,
    /// Stationary law on each class (same order as the members).
    pub class_laws: Vec<Vec<f64>>,
    pub class_gains: Vec<f64>,
}

impl Evaluation {
    /// Class with the smallest gain; ties go to the earlier class.
    pub fn best_class(&self) -> usize {
        let mut best = 0;
        for k in 1..self.class_gains.len() {
            if self.class_gains[k] < self.class_gains[best] {
                best = k;
            }
        }
        best
    }

    /// Minimal long-run average cost over stationary laws of the kernel.
    pub fn rho(&self) -> f64 {
        self.class_gains[self.best_class()]
    }

    /// Stationary law of [`Self::best_class`] extended by zero.
    pub fn best_law(&self, n: usize) -> Vec<f64> {
        let k = self.best_class();
        let mut law = vec![0.0; n];
        for (&s, &p) in self.classes[k].iter().zip(&self.class_laws[k]) {
            law[s] = p;
        }
        law
    }
}

/// Solves `g = Rg`, `g + h = c + Rh` on every state of a stochastic sparse
/// kernel with per-class normalization `π_C h = 0`.
pub(crate) fn evaluate(rows: &[Vec<(usize, f64)>], cost: &[f64]) -> Result<Evaluation> {
    let n = rows.len();
    let comps = strongly_connected_components(n, |s| rows[s].iter().map(|&(t, _)| t));
    let mut classes: Vec<Vec<usize>> = comps
        .closed(|s| rows[s].iter().map(|&(t, _)| t))
        .into_iter()
        .map(|c| comps.members[c].clone())
        .collect();
    classes.sort();

    let mut gain = vec![f64::NAN; n];
    let mut bias = vec![f64::NAN; n];
    let mut class_laws = Vec::with_capacity(classes.len());
    let mut class_gains = Vec::with_capacity(classes.len());
    let mut local = vec![usize::MAX; n];

    for class in &classes {
        let k = class.len();
        for (i, &s) in class.iter().enumerate() {
            local[s] = i;
        }
        // A = I − R_C + 11ᵀ is nonsingular for an irreducible R_C.
        let mut a = DMatrix::from_element(k, k, 1.0);
        for (i, &s) in class.iter().enumerate() {
            a[(i, i)] += 1.0;
            for &(t, r) in &rows[s] {
                a[(i, local[t])] -= r;
            }
        }
        let lu = a.lu();
        let c = DVector::from_fn(k, |i, _| cost[class[i]]);
        // With πA = 1ᵀ, x = A⁻¹c satisfies (I − R)x = c − (1ᵀx)·1.
        let x = lu.solve(&c).ok_or(Error::NumericalNonConvergence { residual: f64::INFINITY })?;
        let pi = transpose_solve(&lu, k)?;
        let pi = crate::markov::clean_distribution(pi.as_slice());
        let g: f64 = pi.iter().zip(class).map(|(p, &s)| p * cost[s]).sum();
        let shift: f64 = pi.iter().zip(x.iter()).map(|(p, x)| p * x).sum();
        for (i, &s) in class.iter().enumerate() {
            gain[s] = g;
            bias[s] = x[i] - shift;
        }
        class_laws.push(pi);
        class_gains.push(g);
    }

    let transient: Vec<usize> = (0..n).filter(|&s| gain[s].is_nan()).collect();
    if !transient.is_empty() {
        let k = transient.len();
        for (i, &s) in transient.iter().enumerate() {
            local[s] = i;
        }
        let mut a = DMatrix::identity(k, k);
        let mut rg = DVector::<f64>::zeros(k);
        let mut rh = DVector::<f64>::zeros(k);
        for (i, &s) in transient.iter().enumerate() {
            for &(t, r) in &rows[s] {
                if gain[t].is_nan() {
                    a[(i, local[t])] -= r;
                } else {
                    rg[i] += r * gain[t];
                    rh[i] += r * bias[t];
                }
            }
        }
        let lu = a.lu();
        let gt = lu.solve(&rg).ok_or(Error::NumericalNonConvergence { residual: f64::INFINITY })?;
        let rhs = DVector::from_fn(k, |i, _| cost[transient[i]] - gt[i] + rh[i]);
        let ht = lu.solve(&rhs).ok_or(Error::NumericalNonConvergence { residual: f64::INFINITY })?;
        for (i, &s) in transient.iter().enumerate() {
            gain[s] = gt[i];
            bias[s] = ht[i];
        }
    }

    Ok(Evaluation {
        gain,
        bias,
        classes,
        class_laws,
        class_gains,
    })
}

/// Solves `Aᵀy = 1` from an existing factorization `PA = LU`.
fn transpose_solve(lu: &nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, k: usize) -> Result<DVector<f64>> {
    // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀz = 1, Lᵀw = z, then y = P⁻¹w.
    let u = lu.u();
    let l = lu.l();
    let ones = DVector::from_element(k, 1.0);
    let z = u
        .tr_solve_upper_triangular(&ones)
        .ok_or(Error::NumericalNonConvergence { residual: f64::INFINITY })?;
    let mut w = l
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::NumericalNonConvergence { residual: f64::INFINITY })?;
    lu.p().inv_permute_rows(&mut w);
    Ok(w)
}
