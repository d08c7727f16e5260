//! Seeded random networks.
//!
//! Every generator draws from its own `ChaCha8Rng` seeded with the caller's
//! `u64`, so outputs are bit-for-bit reproducible. Draw order is part of the
//! contract: vertex count first (when random), then pairs in row-major order
//! of the upper triangle.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Label, Network, VertexAttributes};

/// Within-block connection probability: one for all blocks or one per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WithinProbability {
    Scalar(f64),
    PerBlock(Vec<f64>),
}

impl WithinProbability {
    fn get(&self, block: usize) -> f64 {
        match self {
            WithinProbability::Scalar(p) => *p,
            WithinProbability::PerBlock(ps) => ps[block],
        }
    }
}

/// Description of a random network class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `n` uniform on `n_range` (inclusive), each pair joined with
    /// probability `p`.
    ErdosRenyi { n_range: (usize, usize), p: f64 },
    Sbm {
        block_sizes: Vec<usize>,
        p_within: WithinProbability,
        p_between: f64,
    },
    Lollipop {
        candy_range: (usize, usize),
        stick_range: (usize, usize),
        extra_edge_p: f64,
    },
    RandomWeightedAdjacency { n_range: (usize, usize), alphabet: Vec<u32> },
}

impl GeneratorSpec {
    pub fn erdos_renyi(n_range: (usize, usize), p: f64) -> Self {
        GeneratorSpec::ErdosRenyi { n_range, p }
    }

    pub fn sbm(block_sizes: Vec<usize>, p_within: f64, p_between: f64) -> Self {
        GeneratorSpec::Sbm {
            block_sizes,
            p_within: WithinProbability::Scalar(p_within),
            p_between,
        }
    }

    /// Candy and stick sizes in `7..=15`, chords with probability `0.5`.
    pub fn lollipop() -> Self {
        GeneratorSpec::Lollipop {
            candy_range: (7, 15),
            stick_range: (7, 15),
            extra_edge_p: 0.5,
        }
    }

    /// `n` in `6..=20` with entries from `alphabet`.
    pub fn random_weighted_adjacency(alphabet: Vec<u32>) -> Self {
        GeneratorSpec::RandomWeightedAdjacency {
            n_range: (6, 20),
            alphabet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64, what: &str| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} probability {p} outside [0, 1]")))
            }
        };
        let range = |(lo, hi): (usize, usize), min: usize, what: &str| {
            if lo >= min && lo <= hi {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} range ({lo}, {hi}) invalid")))
            }
        };
        match self {
            GeneratorSpec::ErdosRenyi { n_range, p } => {
                range(*n_range, 2, "vertex")?;
                prob(*p, "edge")
            }
            GeneratorSpec::Sbm {
                block_sizes,
                p_within,
                p_between,
            } => {
                if block_sizes.is_empty() || block_sizes.contains(&0) {
                    return Err(Error::InvalidParameter("block sizes must be positive".into()));
                }
                match p_within {
                    WithinProbability::Scalar(p) => prob(*p, "within-block")?,
                    WithinProbability::PerBlock(ps) => {
                        if ps.len() != block_sizes.len() {
                            return Err(Error::DimensionMismatch {
                                expected: block_sizes.len(),
                                found: ps.len(),
                            });
                        }
                        for &p in ps {
                            prob(p, "within-block")?;
                        }
                    }
                }
                prob(*p_between, "between-block")
            }
            GeneratorSpec::Lollipop {
                candy_range,
                stick_range,
                extra_edge_p,
            } => {
                range(*candy_range, 3, "candy")?;
                range(*stick_range, 0, "stick")?;
                prob(*extra_edge_p, "chord")
            }
            GeneratorSpec::RandomWeightedAdjacency { n_range, alphabet } => {
                range(*n_range, 1, "vertex")?;
                if alphabet.is_empty() {
                    return Err(Error::InvalidParameter("alphabet is empty".into()));
                }
                Ok(())
            }
        }
    }

    /// Draws one network. SBM outputs carry block labels as vertex labels.
    pub fn generate(&self, seed: u64) -> Result<Network> {
        match self {
            GeneratorSpec::ErdosRenyi { .. } => gen_erdos_renyi(self, seed),
            GeneratorSpec::Sbm {
                block_sizes,
                p_within,
                p_between,
            } => gen_sbm(block_sizes, p_within.clone(), *p_between, seed).map(|(g, _)| g),
            GeneratorSpec::Lollipop {
                candy_range,
                stick_range,
                extra_edge_p,
            } => gen_lollipop(*candy_range, *stick_range, *extra_edge_p, seed),
            GeneratorSpec::RandomWeightedAdjacency { n_range, alphabet } => {
                gen_random_weighted_adjacency(*n_range, alphabet, seed)
            }
        }
    }
}

fn undirected(weights: DMatrix<f64>) -> Result<Network> {
    Network::from_weight_matrix(weights, false)
}

/// Undirected unit-weight G(n, p). Connectivity is not enforced.
pub fn gen_erdos_renyi(spec: &GeneratorSpec, seed: u64) -> Result<Network> {
    spec.validate()?;
    let GeneratorSpec::ErdosRenyi { n_range, p } = spec else {
        return Err(Error::InvalidParameter("expected an Erdős–Rényi spec".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(n_range.0..=n_range.1);
    let mut w = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(*p) {
                w[(u, v)] = 1.0;
                w[(v, u)] = 1.0;
            }
        }
    }
    undirected(w)
}

/// Undirected unit-weight stochastic block model. Blocks are contiguous and
/// labelled `0..k`; the labels are returned and attached as vertex labels.
pub fn gen_sbm(
    block_sizes: &[usize],
    p_within: WithinProbability,
    p_between: f64,
    seed: u64,
) -> Result<(Network, Vec<usize>)> {
    GeneratorSpec::Sbm {
        block_sizes: block_sizes.to_vec(),
        p_within: p_within.clone(),
        p_between,
    }
    .validate()?;
    let labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] {
                p_within.get(labels[u])
            } else {
                p_between
            };
            if rng.random_bool(p) {
                w[(u, v)] = 1.0;
                w[(v, u)] = 1.0;
            }
        }
    }
    let attrs = VertexAttributes {
        labels: Some(labels.iter().map(|&b| Label::Int(b as i64)).collect()),
        embedding: None,
    };
    Ok((undirected(w)?.with_attributes(attrs)?, labels))
}

/// Lollipop: a candy on vertices `0..c` (a cycle plus independent chords)
/// and a path stick on `c..c+k` hanging off candy vertex `0`.
pub fn gen_lollipop(
    candy_range: (usize, usize),
    stick_range: (usize, usize),
    extra_edge_p: f64,
    seed: u64,
) -> Result<Network> {
    GeneratorSpec::Lollipop {
        candy_range,
        stick_range,
        extra_edge_p,
    }
    .validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = rng.random_range(candy_range.0..=candy_range.1);
    let k = rng.random_range(stick_range.0..=stick_range.1);
    let n = c + k;
    let mut w = DMatrix::zeros(n, n);
    let mut join = |a: usize, b: usize| {
        w[(a, b)] = 1.0;
        w[(b, a)] = 1.0;
    };
    for u in 0..c {
        join(u, (u + 1) % c);
    }
    for u in 0..c {
        for v in u + 2..c {
            if (u, v) != (0, c - 1) && rng.random_bool(extra_edge_p) {
                join(u, v);
            }
        }
    }
    let mut prev = 0;
    for s in c..n {
        join(prev, s);
        prev = s;
    }
    undirected(w)
}

/// Symmetric matrix whose upper triangle (diagonal included) is drawn
/// uniformly from `alphabet`; zero entries are non-edges.
pub fn gen_random_weighted_adjacency(n_range: (usize, usize), alphabet: &[u32], seed: u64) -> Result<Network> {
    GeneratorSpec::RandomWeightedAdjacency {
        n_range,
        alphabet: alphabet.to_vec(),
    }
    .validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(n_range.0..=n_range.1);
    let mut w = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            let x = alphabet[rng.random_range(0..alphabet.len())] as f64;
            w[(u, v)] = x;
            w[(v, u)] = x;
        }
    }
    undirected(w)
}

/// Strongly connected network on `n` vertices: a random Hamiltonian cycle
/// plus each remaining ordered pair (loops included) with probability
/// `density`, weights uniform on `[0.5, 3)`. Undirected outputs are
/// symmetrized.
pub fn random_strongly_connected(n: usize, directed: bool, density: f64, seed: u64) -> Result<Network> {
    if n == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("n = {n}, density = {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        w[(order[i], order[(i + 1) % n])] = rng.random_range(0.5..3.0);
    }
    for u in 0..n {
        for v in 0..n {
            if w[(u, v)] == 0.0 && rng.random_bool(density) {
                w[(u, v)] = rng.random_range(0.5..3.0);
            }
        }
    }
    if !directed {
        let upper = w.clone();
        w = DMatrix::from_fn(n, n, |u, v| upper[(u, v)].max(upper[(v, u)]));
    }
    Network::from_weight_matrix(w, directed)
}

/// Relabels `net` by a uniform random permutation `φ`, so that vertex `u`
/// becomes `φ[u]`.
pub fn permuted_copy(net: &Network, seed: u64) -> Result<(Network, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi: Vec<usize> = (0..net.n()).collect();
    phi.shuffle(&mut rng);
    Ok((net.permuted(&phi)?, phi))
}
