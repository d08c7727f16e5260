use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rayon::prelude::*;

use super::{align, mean_sd, BenchSolver};
use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::network::Network;

/// Test accuracy of each random split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnResult {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

/// k-nearest-neighbour classification from a precomputed distance matrix
/// over `repeats` random train/test splits.
///
/// The matrix is symmetrized by averaging with its transpose. Neighbours at
/// equal distance are taken in index order. A tied vote goes to the label
/// whose voters have the smallest mean distance, then to the lowest label.
pub fn knn_classify(
    distances: &DMatrix<f64>,
    labels: &[usize],
    k: usize,
    train_fraction: f64,
    repeats: usize,
    seed: u64,
) -> Result<KnnResult> {
    let n = labels.len();
    if distances.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: distances.len(),
        });
    }
    if k == 0 || repeats == 0 {
        return Err(Error::InvalidParameter("k and repeats must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidParameter(format!("train fraction {train_fraction} outside [0, 1]")));
    }
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train < k || n_train >= n {
        return Err(Error::DegenerateSplit(format!(
            "{n_train} training items out of {n} with k = {k}"
        )));
    }
    let d = (distances + distances.transpose()) * 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accuracies = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (train, test) = order.split_at(n_train);
        let mut train = train.to_vec();
        train.sort_unstable();
        let correct = test
            .iter()
            .filter(|&&t| predict(&d, labels, &train, t, k) == labels[t])
            .count();
        accuracies.push(correct as f64 / test.len() as f64);
    }
    let (mean, sd) = mean_sd(&accuracies);
    Ok(KnnResult { accuracies, mean, sd })
}

fn predict(d: &DMatrix<f64>, labels: &[usize], train: &[usize], item: usize, k: usize) -> usize {
    let mut near: Vec<usize> = train.to_vec();
    near.sort_by(|&a, &b| d[(item, a)].total_cmp(&d[(item, b)]).then(a.cmp(&b)));
    near.truncate(k);
    // label -> (votes, total distance)
    let mut tally: Vec<(usize, usize, f64)> = Vec::new();
    for &j in &near {
        match tally.iter_mut().find(|t| t.0 == labels[j]) {
            Some(t) => {
                t.1 += 1;
                t.2 += d[(item, j)];
            }
            None => tally.push((labels[j], 1, d[(item, j)])),
        }
    }
    tally
        .into_iter()
        .min_by(|a, b| {
            b.1.cmp(&a.1)
                .then((a.2 / a.1 as f64).total_cmp(&(b.2 / b.1 as f64)))
                .then(a.0.cmp(&b.0))
        })
        .map(|t| t.0)
        .expect("k ≥ 1")
}

/// Symmetric matrix of pairwise `ρ` values, computed in parallel over
/// pairs `i < j`. The diagonal is zero.
pub fn distance_matrix<F>(graphs: &[Network], solver: BenchSolver, cost: F) -> Result<DMatrix<f64>>
where
    F: Fn(&Network, &Network) -> Result<CostMatrix> + Sync,
{
    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            let c = cost(&graphs[i], &graphs[j])?;
            Ok(align(&graphs[i], &graphs[j], &c, solver)?.rho)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut d = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[(i, j)] = v;
        d[(j, i)] = v;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_tie_goes_to_closer_label() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 2.0, 0.0, 5.0, 1.0, 5.0, 0.0]);
        assert_eq!(predict(&d, &[0, 7, 3], &[1, 2], 0, 2), 3);
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 5.0, 1.0, 5.0, 0.0]);
        assert_eq!(predict(&d, &[0, 7, 3], &[1, 2], 0, 2), 3);
    }

    #[test]
    fn degenerate_split() {
        let d = DMatrix::zeros(4, 4);
        assert!(matches!(
            knn_classify(&d, &[0, 0, 1, 1], 5, 0.8, 1, 0),
            Err(Error::DegenerateSplit(_))
        ));
    }
}
