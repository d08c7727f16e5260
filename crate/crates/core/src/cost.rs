//! Vertex-to-vertex cost matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{DegreeMode, Label, Network};

/// Which rule produced a [`CostMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostRule {
    ZeroOneIdentity,
    AttributeZeroOne,
    DegreeSquared,
    StandardizedDegreeSquared,
    Euclidean,
    SquaredEuclidean,
    Custom,
}

/// Nonnegative finite `|U| × |V|` cost `c(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    values: DMatrix<f64>,
    rule: CostRule,
}

impl CostMatrix {
    /// Wraps a user-supplied matrix.
    pub fn custom(values: DMatrix<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cost entries must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(CostMatrix {
            values,
            rule: CostRule::Custom,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn rule(&self) -> CostRule {
        self.rule
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[(u, v)]
    }

    pub fn transpose(&self) -> Self {
        CostMatrix {
            values: self.values.transpose(),
            rule: self.rule,
        }
    }
}

/// `c(u, v) = 1(u ≠ v)` on a common vertex set of size `n`.
pub fn zero_one_identity(n: usize) -> CostMatrix {
    CostMatrix {
        values: DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 }),
        rule: CostRule::ZeroOneIdentity,
    }
}

/// Zero-one cost on discrete labels: `c(u, v) = 1(label(u) ≠ label(v))`.
pub fn attribute_zero_one(labels1: &[Label], labels2: &[Label]) -> CostMatrix {
    CostMatrix {
        values: DMatrix::from_fn(labels1.len(), labels2.len(), |i, j| {
            if labels1[i] == labels2[j] {
                0.0
            } else {
                1.0
            }
        }),
        rule: CostRule::AttributeZeroOne,
    }
}

/// Attribute cost read from the networks' label payloads.
pub fn attribute_cost(g1: &Network, g2: &Network) -> Result<CostMatrix> {
    let l1 = g1.attributes().labels.as_ref().ok_or(Error::MissingAttributes("labels"))?;
    let l2 = g2.attributes().labels.as_ref().ok_or(Error::MissingAttributes("labels"))?;
    Ok(attribute_zero_one(l1, l2))
}

/// `c(u, v) = (deg(u) − deg(v))²` on weighted degrees.
///
/// With `standardized`, each degree is first divided by its network's total
/// degree so networks of different size and scale are comparable.
pub fn degree_cost(
    g1: &Network,
    g2: &Network,
    standardized: bool,
    mode: DegreeMode,
) -> Result<CostMatrix> {
    let prep = |g: &Network| -> Result<Vec<f64>> {
        let mut d = g.degree_vector(mode)?;
        if standardized {
            let total: f64 = d.iter().sum();
            if total > 0.0 {
                d.iter_mut().for_each(|x| *x /= total);
            }
        }
        Ok(d)
    };
    let d1 = prep(g1)?;
    let d2 = prep(g2)?;
    Ok(CostMatrix {
        values: DMatrix::from_fn(d1.len(), d2.len(), |i, j| (d1[i] - d2[j]).powi(2)),
        rule: if standardized {
            CostRule::StandardizedDegreeSquared
        } else {
            CostRule::DegreeSquared
        },
    })
}

/// Pairwise Euclidean (or squared Euclidean) distances between embeddings.
pub fn embedding_cost(emb1: &[Vec<f64>], emb2: &[Vec<f64>], squared: bool) -> Result<CostMatrix> {
    let dim = emb1.first().or(emb2.first()).map_or(0, Vec::len);
    for row in emb1.iter().chain(emb2) {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
    }
    let values = DMatrix::from_fn(emb1.len(), emb2.len(), |i, j| {
        let sq: f64 = emb1[i].iter().zip(&emb2[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        if squared {
            sq
        } else {
            sq.sqrt()
        }
    });
    Ok(CostMatrix {
        values,
        rule: if squared {
            CostRule::SquaredEuclidean
        } else {
            CostRule::Euclidean
        },
    })
}

/// Embedding cost read from the networks' embedding payloads.
pub fn network_embedding_cost(g1: &Network, g2: &Network, squared: bool) -> Result<CostMatrix> {
    let e1 = g1.attributes().embedding.as_ref().ok_or(Error::MissingAttributes("embedding"))?;
    let e2 = g2.attributes().embedding.as_ref().ok_or(Error::MissingAttributes("embedding"))?;
    embedding_cost(e1, e2, squared)
}
