use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovKernel;

/// Joint kernel `R((u',v') | (u,v))` on the product state space together with
/// a stationary law `λ`.
///
/// States are indexed `s = u·|V| + v`. Rows are stored sparsely as sorted
/// `(target state, probability)` lists.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCoupling {
    n1: usize,
    n2: usize,
    rows: Vec<Vec<(usize, f64)>>,
    stationary: Vec<f64>,
}

impl TransitionCoupling {
    /// Assembles a coupling from explicit rows and law. Only shapes are
    /// checked here; see [`Self::marginal_violation`] and
    /// [`Self::stationarity_residual`].
    pub fn from_parts(
        n1: usize,
        n2: usize,
        mut rows: Vec<Vec<(usize, f64)>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let n = n1 * n2;
        if rows.len() != n || stationary.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len().min(stationary.len()),
            });
        }
        for row in &mut rows {
            row.retain(|&(_, p)| p > 0.0);
            row.sort_by_key(|&(t, _)| t);
            if let Some(&(t, _)) = row.iter().find(|&&(t, _)| t >= n) {
                return Err(Error::IndexOutOfRange { index: t, n });
            }
        }
        Ok(TransitionCoupling {
            n1,
            n2,
            rows,
            stationary,
        })
    }

    /// `|U|`, `|V|`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn state_count(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn state(&self, u: usize, v: usize) -> usize {
        u * self.n2 + v
    }

    pub fn pair(&self, s: usize) -> (usize, usize) {
        (s / self.n2, s % self.n2)
    }

    pub fn row(&self, s: usize) -> &[(usize, f64)] {
        &self.rows[s]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from]
            .binary_search_by_key(&to, |&(t, _)| t)
            .map_or(0.0, |k| self.rows[from][k].1)
    }

    /// Stationary law `λ` over states.
    pub fn stationary_law(&self) -> &[f64] {
        &self.stationary
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.state_count();
        let mut m = DMatrix::zeros(n, n);
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, p) in row {
                m[(s, t)] = p;
            }
        }
        m
    }

    /// Largest deviation from `Σ_ṽ R(u',ṽ|u,v) = P(u'|u)` and
    /// `Σ_ũ R(ũ,v'|u,v) = Q(v'|v)` over all states.
    pub fn marginal_violation(&self, p: &MarkovKernel, q: &MarkovKernel) -> Result<f64> {
        if p.n() != self.n1 || q.n() != self.n2 {
            return Err(Error::DimensionMismatch {
                expected: self.n1 * self.n2,
                found: p.n() * q.n(),
            });
        }
        let mut worst = 0.0f64;
        let mut left = vec![0.0; self.n1];
        let mut right = vec![0.0; self.n2];
        for s in 0..self.state_count() {
            let (u, v) = self.pair(s);
            left.iter_mut().for_each(|x| *x = 0.0);
            right.iter_mut().for_each(|x| *x = 0.0);
            for &(t, r) in &self.rows[s] {
                let (a, b) = self.pair(t);
                left[a] += r;
                right[b] += r;
            }
            for a in 0..self.n1 {
                worst = worst.max((left[a] - p.prob(u, a)).abs());
            }
            for b in 0..self.n2 {
                worst = worst.max((right[b] - q.prob(v, b)).abs());
            }
        }
        Ok(worst)
    }

    /// `‖λR − λ‖₁`.
    pub fn stationarity_residual(&self) -> f64 {
        let mut next = vec![0.0; self.state_count()];
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, r) in row {
                next[t] += self.stationary[s] * r;
            }
        }
        next.iter().zip(&self.stationary).map(|(a, b)| (a - b).abs()).sum()
    }

    /// `⟨λ, c⟩` with `c` laid out as a `|U| × |V|` matrix.
    pub fn expected_cost(&self, cost: &DMatrix<f64>) -> f64 {
        (0..self.state_count())
            .map(|s| {
                let (u, v) = self.pair(s);
                self.stationary[s] * cost[(u, v)]
            })
            .sum()
    }

    /// `π_v(u,v) = λ(u,v)`.
    pub fn vertex_alignment(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n1, self.n2, |u, v| self.stationary[u * self.n2 + v])
    }

    /// `π_e((u,u'),(v,v')) = λ(u,v)·R(u',v'|u,v)` on its support, in state
    /// order.
    pub fn edge_alignment(&self) -> Vec<EdgeMass> {
        let mut out = Vec::new();
        for (s, row) in self.rows.iter().enumerate() {
            let l = self.stationary[s];
            if l <= 0.0 {
                continue;
            }
            let (u, v) = self.pair(s);
            for &(t, r) in row {
                let (u2, v2) = self.pair(t);
                out.push(EdgeMass {
                    edge1: (u, u2),
                    edge2: (v, v2),
                    mass: l * r,
                });
            }
        }
        out
    }

    /// States that can be reached from `s` with positive probability.
    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[s].iter().map(|&(t, _)| t)
    }

    /// Recurrent classes of the support graph, each sorted.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let comps = crate::scc::strongly_connected_components(self.state_count(), |s| self.successors(s));
        let mut classes: Vec<Vec<usize>> = comps
            .closed(|s| self.successors(s))
            .into_iter()
            .map(|c| comps.members[c].clone())
            .collect();
        classes.sort();
        classes
    }
}

/// One atom of the edge alignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeMass {
    pub edge1: (usize, usize),
    pub edge2: (usize, usize),
    pub mass: f64,
}

/// Independent transition coupling `R(u',v'|u,v) = P(u'|u)·Q(v'|v)` with
/// `λ = p ⊗ q`.
pub fn independent_coupling(p: &MarkovKernel, q: &MarkovKernel) -> Result<TransitionCoupling> {
    let pl = p.stationary_distribution()?;
    let ql = q.stationary_distribution()?;
    let (n1, n2) = (p.n(), q.n());
    let rows = (0..n1 * n2)
        .map(|s| independent_row(p, q, s / n2, s % n2))
        .collect();
    let stationary = (0..n1 * n2)
        .map(|s| pl.probs()[s / n2] * ql.probs()[s % n2])
        .collect();
    TransitionCoupling::from_parts(n1, n2, rows, stationary)
}

pub(crate) fn independent_row(p: &MarkovKernel, q: &MarkovKernel, u: usize, v: usize) -> Vec<(usize, f64)> {
    let n2 = q.n();
    let qs = q.support(v);
    p.support(u)
        .into_iter()
        .flat_map(|(a, pa)| qs.iter().map(move |&(b, qb)| (a * n2 + b, pa * qb)))
        .collect()
}
