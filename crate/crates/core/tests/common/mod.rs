#![allow(dead_code)]

pub mod brute;
pub mod properties;

use nalgebra::DMatrix;
use netotc::network::Network;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random strongly connected network: a Hamiltonian cycle plus random extra
/// edges (and occasional loops), positive random weights.
pub fn random_strong_network(rng: &mut ChaCha8Rng, n: usize, directed: bool, density: f64) -> Network {
    let mut w = DMatrix::zeros(n, n);
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    for k in 0..n {
        let (a, b) = (order[k], order[(k + 1) % n]);
        w[(a, b)] = rng.random_range(0.5..3.0);
    }
    for a in 0..n {
        for b in 0..n {
            if w[(a, b)] == 0.0 && rng.random_bool(density) {
                w[(a, b)] = rng.random_range(0.5..3.0);
            }
        }
    }
    if n == 1 {
        w[(0, 0)] = 1.0;
    }
    if !directed {
        w = (&w + w.transpose()) * 0.5;
    }
    Network::from_weight_matrix(w, directed).unwrap()
}

pub fn random_cost(rng: &mut ChaCha8Rng, n1: usize, n2: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n1, n2, |_, _| rng.random_range(0.0..1.0))
}

pub fn random_cost_matrix(rng: &mut ChaCha8Rng, n1: usize, n2: usize) -> netotc::CostMatrix {
    netotc::CostMatrix::custom(random_cost(rng, n1, n2)).unwrap()
}

/// The five-vertex network and its three-vertex factor under the map that
/// collapses vertical lines, with their planar embeddings.
pub fn factor_example() -> (Network, Network, netotc::factor::FactorMap, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    use netotc::VertexAttributes;
    // (-1,1), (-1,-1), (0,0), (1,0), (1,-1)
    let e1 = vec![vec![-1.0, 1.0], vec![-1.0, -1.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, -1.0]];
    let g1 = Network::build(
        5,
        &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0), (2, 4, 1.0), (3, 4, 1.0)],
        false,
        VertexAttributes::default(),
    )
    .unwrap();
    // (-1,0), (0,0), (1,0)
    let e2 = vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]];
    let g2 = Network::build(
        3,
        &[(0, 1, 2.0), (1, 2, 2.0), (0, 0, 2.0), (2, 2, 2.0)],
        false,
        VertexAttributes::default(),
    )
    .unwrap();
    let f = netotc::factor::FactorMap::new(vec![0, 0, 1, 2, 2], 3).unwrap();
    (g1, g2, f, e1, e2)
}

pub fn unit_circle(angles: &[f64]) -> Vec<Vec<f64>> {
    angles.iter().map(|a| vec![a.cos(), a.sin()]).collect()
}

fn unit_path(n: usize, close: bool) -> Network {
    let mut edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|k| (k, k + 1, 1.0)).collect();
    if close {
        edges.push((n - 1, 0, 1.0));
    }
    Network::build(n, &edges, false, Default::default()).unwrap()
}

/// The octagon, the octagon with one side removed, and the same path bent
/// onto a half circle, each with its planar embedding.
pub fn octagon_networks() -> [(Network, Vec<Vec<f64>>); 3] {
    use std::f64::consts::PI;
    let ring: Vec<f64> = (0..8).map(|k| PI / 8.0 + k as f64 * PI / 4.0).collect();
    let half: Vec<f64> = (0..8).map(|k| PI / 2.0 + k as f64 * PI / 7.0).collect();
    [
        (unit_path(8, true), unit_circle(&ring)),
        (unit_path(8, false), unit_circle(&ring)),
        (unit_path(8, false), unit_circle(&half)),
    ]
}
