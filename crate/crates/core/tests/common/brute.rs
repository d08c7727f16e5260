//! Brute-force optimal transition coupling for tiny instances.
//!
//! Average-cost MDPs with polytope action sets and linear costs have a
//! deterministic optimal policy on the vertices, so it suffices to try
//! every combination of extreme per-state couplings and, for each, the
//! cheapest stationary law (the cheapest recurrent class).

use nalgebra::DMatrix;
use netotc::MarkovKernel;

type Plan = Vec<((usize, usize), f64)>;

/// Extreme points of the couplings of `mu` and `nu` (with duplicates).
pub fn transport_vertices(mu: &[f64], nu: &[f64]) -> Vec<Plan> {
    let (m, n) = (mu.len(), nu.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let k = m + n - 1;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let basis: Vec<(usize, usize)> = idx.iter().map(|&t| cells[t]).collect();
        if let Some(plan) = tree_flow(&basis, mu, nu) {
            out.push(plan);
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == cells.len() - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn tree_flow(basis: &[(usize, usize)], mu: &[f64], nu: &[f64]) -> Option<Plan> {
    let mut supply = mu.to_vec();
    let mut demand = nu.to_vec();
    let mut open = basis.to_vec();
    let mut plan = Vec::new();
    while !open.is_empty() {
        let leaf = (0..open.len()).find(|&a| {
            let (i, j) = open[a];
            open.iter().filter(|c| c.0 == i).count() == 1 || open.iter().filter(|c| c.1 == j).count() == 1
        })?;
        let (i, j) = open.swap_remove(leaf);
        let x = if !open.iter().any(|c| c.0 == i) { supply[i] } else { demand[j] };
        if x < -1e-12 {
            return None;
        }
        supply[i] -= x;
        demand[j] -= x;
        plan.push(((i, j), x.max(0.0)));
    }
    let slack = supply.iter().chain(&demand).map(|x| x.abs()).fold(0.0, f64::max);
    (slack < 1e-9).then_some(plan)
}

fn support(k: &MarkovKernel, u: usize) -> Vec<(usize, f64)> {
    (0..k.n()).filter(|&v| k.prob(u, v) > 0.0).map(|v| (v, k.prob(u, v))).collect()
}

/// Cheapest stationary cost of a joint kernel: minimum over closed
/// communicating classes of the class's stationary cost.
pub fn best_stationary_cost(r: &DMatrix<f64>, c: &[f64]) -> f64 {
    let n = r.nrows();
    let mut reach = DMatrix::from_fn(n, n, |i, j| i == j || r[(i, j)] > 0.0);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[(i, k)] && reach[(k, j)] {
                    reach[(i, j)] = true;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    for s in 0..n {
        // s is recurrent iff everything it reaches reaches it back.
        if !(0..n).all(|t| !reach[(s, t)] || reach[(t, s)]) {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&t| reach[(s, t)]).collect();
        if class[0] != s {
            continue;
        }
        let m = class.len();
        // Solve πA = e with A = I − R_C + 11ᵀ.
        let a = DMatrix::from_fn(m, m, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - r[(class[i], class[j])] + 1.0
        });
        let pi = a.transpose().lu().solve(&nalgebra::DVector::from_element(m, 1.0)).expect("irreducible class");
        let cost: f64 = (0..m).map(|i| pi[i] * c[class[i]]).sum();
        best = best.min(cost);
    }
    best
}

/// Optimal transition coupling cost by exhaustive policy search.
pub fn brute_force_otc(p: &MarkovKernel, q: &MarkovKernel, cost: &DMatrix<f64>) -> f64 {
    let (n1, n2) = (p.n(), q.n());
    let n = n1 * n2;
    let mut actions: Vec<Vec<Vec<(usize, f64)>>> = Vec::with_capacity(n);
    for s in 0..n {
        let (a, b) = (support(p, s / n2), support(q, s % n2));
        let mu: Vec<f64> = a.iter().map(|x| x.1).collect();
        let nu: Vec<f64> = b.iter().map(|x| x.1).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = transport_vertices(&mu, &nu)
            .into_iter()
            .map(|plan| plan.into_iter().map(|((i, j), x)| (a[i].0 * n2 + b[j].0, x)).collect())
            .collect();
        rows.sort_by(|x, y| x.partial_cmp(y).unwrap());
        rows.dedup_by(|x, y| x.iter().zip(y.iter()).all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() < 1e-12) && x.len() == y.len());
        actions.push(rows);
    }
    let c: Vec<f64> = (0..n).map(|s| cost[(s / n2, s % n2)]).collect();
    let mut choice = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut r = DMatrix::zeros(n, n);
        for s in 0..n {
            for &(t, x) in &actions[s][choice[s]] {
                r[(s, t)] += x;
            }
        }
        best = best.min(best_stationary_cost(&r, &c));
        let mut s = 0;
        loop {
            if s == n {
                return best;
            }
            choice[s] += 1;
            if choice[s] < actions[s].len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}
