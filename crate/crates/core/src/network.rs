//! Weighted directed networks.
//!
//! A [`Network`] stores a dense `n × n` weight matrix with the invariant
//! `w(u, u') > 0` exactly on the edge set. Undirected networks are stored as
//! symmetric directed ones. Vertices are dense `0..n` ids; external labels are
//! mapped at the file boundary.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::scc::strongly_connected_components;

/// Discrete vertex label as found in network files and TU datasets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Text(v.to_owned())
    }
}

/// Optional per-vertex payload: a discrete label and/or a Euclidean embedding.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexAttributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<Vec<f64>>>,
}

impl VertexAttributes {
    pub fn is_empty(&self) -> bool {
        self.labels.is_none() && self.embedding.is_none()
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        if let Some(emb) = &self.embedding {
            if emb.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: emb.len(),
                });
            }
            let dim = emb.first().map_or(0, Vec::len);
            for row in emb {
                if row.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: row.len(),
                    });
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "embedding contains a non-finite coordinate".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn permuted(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let relabel = |src: &Vec<Label>| {
            let mut out = src.clone();
            for u in 0..n {
                out[perm[u]] = src[u].clone();
            }
            out
        };
        let reembed = |src: &Vec<Vec<f64>>| {
            let mut out = src.clone();
            for u in 0..n {
                out[perm[u]] = src[u].clone();
            }
            out
        };
        VertexAttributes {
            labels: self.labels.as_ref().map(relabel),
            embedding: self.embedding.as_ref().map(reembed),
        }
    }
}

/// Which weighted degree to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    Out,
    In,
    Undirected,
}

/// Weighted directed network `G = (U, E, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    weights: DMatrix<f64>,
    directed: bool,
    attributes: VertexAttributes,
}

impl Network {
    /// Builds a network from a weighted edge list.
    ///
    /// For undirected networks each edge may be listed in either or both
    /// orientations; both are stored. Listing the same pair twice with
    /// different weights is an error.
    pub fn build(
        n: usize,
        edges: &[(usize, usize, f64)],
        directed: bool,
        attributes: VertexAttributes,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("network needs at least one vertex".into()));
        }
        attributes.validate(n)?;
        let mut weights = DMatrix::<f64>::zeros(n, n);
        for &(u, v, w) in edges {
            for idx in [u, v] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { u, v, weight: w });
            }
            let slots: &[(usize, usize)] = if directed { &[(u, v)] } else { &[(u, v), (v, u)] };
            for &(a, b) in slots {
                let existing = weights[(a, b)];
                if existing != 0.0 && existing != w {
                    return Err(if directed {
                        Error::DuplicateEdge { u: a, v: b }
                    } else {
                        Error::AsymmetricUndirected { u: a.min(b), v: a.max(b) }
                    });
                }
                weights[(a, b)] = w;
            }
        }
        Ok(Network {
            weights,
            directed,
            attributes,
        })
    }

    /// Builds a network from a dense weight matrix; zero entries are non-edges.
    pub fn from_weight_matrix(weights: DMatrix<f64>, directed: bool) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.ncols(),
            });
        }
        for u in 0..n {
            for v in 0..n {
                let w = weights[(u, v)];
                if w < 0.0 || !w.is_finite() {
                    return Err(Error::NonPositiveWeight { u, v, weight: w });
                }
                if !directed && w != weights[(v, u)] {
                    return Err(Error::AsymmetricUndirected { u: u.min(v), v: u.max(v) });
                }
            }
        }
        Ok(Network {
            weights,
            directed,
            attributes: VertexAttributes::default(),
        })
    }

    pub fn with_attributes(mut self, attributes: VertexAttributes) -> Result<Self> {
        attributes.validate(self.n())?;
        self.attributes = attributes;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weights[(u, v)] > 0.0
    }

    pub fn attributes(&self) -> &VertexAttributes {
        &self.attributes
    }

    /// All directed edges `(u, v, w)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |u| {
            (0..n).filter_map(move |v| {
                let w = self.weights[(u, v)];
                (w > 0.0).then_some((u, v, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&v| self.weights[(u, v)] > 0.0)
    }

    /// Weighted degree per vertex.
    pub fn degree_vector(&self, mode: DegreeMode) -> Result<Vec<f64>> {
        let n = self.n();
        match mode {
            DegreeMode::Out => Ok((0..n).map(|u| self.weights.row(u).sum()).collect()),
            DegreeMode::In => Ok((0..n).map(|v| self.weights.column(v).sum()).collect()),
            DegreeMode::Undirected if self.directed => Err(Error::ModeInvalidForDirected),
            DegreeMode::Undirected => Ok((0..n).map(|u| self.weights.row(u).sum()).collect()),
        }
    }

    /// Out-degree, which coincides with the degree for undirected networks.
    pub fn degrees(&self) -> Vec<f64> {
        self.degree_vector(DegreeMode::Out)
            .expect("out-degree is defined for every network")
    }

    /// `D = Σ_u d(u)`.
    pub fn total_degree(&self) -> f64 {
        self.weights.sum()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let comps = strongly_connected_components(self.n(), |u| {
            self.out_neighbors(u).collect::<Vec<_>>()
        });
        comps.count() == 1
    }

    /// Random-walk kernel `P(u'|u) = w(u,u') / d(u)`.
    pub fn transition_kernel(&self) -> Result<MarkovKernel> {
        let n = self.n();
        let mut p = self.weights.clone();
        for u in 0..n {
            let d: f64 = p.row(u).sum();
            if d <= 0.0 {
                return Err(Error::ZeroOutDegree { vertex: u });
            }
            for v in 0..n {
                p[(u, v)] /= d;
            }
        }
        Ok(MarkovKernel::from_normalized(p))
    }

    /// Copy with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {factor} must be positive")));
        }
        Ok(Network {
            weights: &self.weights * factor,
            directed: self.directed,
            attributes: self.attributes.clone(),
        })
    }

    /// Relabels vertices so that vertex `u` becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        let mut weights = DMatrix::zeros(n, n);
        for u in 0..n {
            for v in 0..n {
                weights[(perm[u], perm[v])] = self.weights[(u, v)];
            }
        }
        Ok(Network {
            weights,
            directed: self.directed,
            attributes: self.attributes.permuted(perm),
        })
    }
}

/// Free-function form of [`Network::build`].
pub fn build_network(
    n: usize,
    edges: &[(usize, usize, f64)],
    directed: bool,
    attributes: VertexAttributes,
) -> Result<Network> {
    Network::build(n, edges, directed, attributes)
}

/// `G₁ ∼ G₂`: same edge set and weights proportional by one positive constant.
///
/// Both networks must be undirected. Networks of different sizes are never
/// equivalent.
pub fn networks_equivalent(g1: &Network, g2: &Network) -> Result<bool> {
    if g1.is_directed() || g2.is_directed() {
        return Err(Error::DirectedInput);
    }
    if g1.n() != g2.n() {
        return Ok(false);
    }
    let mut ratio: Option<f64> = None;
    for (a, b) in g1.weights().iter().zip(g2.weights().iter()) {
        match (*a > 0.0, *b > 0.0) {
            (false, false) => {}
            (true, true) => {
                let r = a / b;
                match ratio {
                    None => ratio = Some(r),
                    Some(c) if ((r - c) / c).abs() <= 1e-12 => {}
                    Some(_) => return Ok(false),
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}
