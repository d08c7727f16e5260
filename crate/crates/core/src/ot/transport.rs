//! Transportation simplex on small dense problems.
//!
//! The basis is a spanning tree over the bipartite row/column graph with
//! `m + n − 1` cells. Potentials are recomputed from the tree each pivot,
//! which is cheap at the sizes used here (supports of single kernel rows).

/// Optimal basic solution of a transportation problem.
#[derive(Debug, Clone)]
pub(crate) struct TransportSolution {
    pub n: usize,
    /// Row-major `m × n` flow.
    pub flow: Vec<f64>,
    /// Basic cells `(i, j)`.
    pub basis: Vec<(usize, usize)>,
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
    pub value: f64,
}

impl TransportSolution {
    /// Reduced cost `c_ij − u_i − v_j` against this solution's potentials.
    pub fn reduced_cost(&self, cost: &[f64], i: usize, j: usize) -> f64 {
        cost[i * self.n + j] - self.row_potential[i] - self.col_potential[j]
    }
}

/// Pivots with the steepest (Dantzig) rule until this many consecutive
/// degenerate pivots occur, then switch to Bland's rule, which cannot cycle.
const DEGENERATE_PATIENCE: usize = 64;

/// Solves `min ⟨x, cost⟩` over `x ≥ 0` with row sums `supply` and column sums
/// `demand`. All supplies and demands must be strictly positive and have equal
/// totals.
///
/// `allowed` restricts which cells may enter the basis; `warm` supplies a
/// feasible starting basis whose cells must all be allowed.
pub(crate) fn solve(
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
    allowed: Option<&[bool]>,
    warm: Option<&TransportSolution>,
) -> TransportSolution {
    let m = supply.len();
    let n = demand.len();
    debug_assert_eq!(cost.len(), m * n);

    let (mut flow, mut basis) = match warm {
        Some(w) => (w.flow.clone(), w.basis.clone()),
        None => northwest_corner(supply, demand),
    };

    let scale = cost
        .iter()
        .enumerate()
        .filter(|(k, _)| allowed.is_none_or(|a| a[*k]))
        .fold(1.0f64, |acc, (_, c)| acc.max(c.abs()));
    let tol = 1e-12 * scale;

    let mut in_basis = vec![false; m * n];
    for &(i, j) in &basis {
        in_basis[i * n + j] = true;
    }

    let mut degenerate_run = 0usize;
    let (mut u, mut v) = potentials(m, n, &basis, cost);
    let max_pivots = 50 * (m + n) * (m + n) + 1000;
    for _ in 0..max_pivots {
        let bland = degenerate_run >= DEGENERATE_PATIENCE;
        let mut entering: Option<(usize, usize)> = None;
        let mut best = -tol;
        'scan: for i in 0..m {
            for j in 0..n {
                let k = i * n + j;
                if in_basis[k] || allowed.is_some_and(|a| !a[k]) {
                    continue;
                }
                let rc = cost[k] - u[i] - v[j];
                if rc < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = rc;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            break;
        };

        // Tree path from column ej to row ei; cells alternate −, +, −, …, −.
        let path = tree_path(m, n, &basis, m + ej, ei);
        let mut theta = f64::INFINITY;
        let mut leave_pos = usize::MAX;
        for (step, &bpos) in path.iter().enumerate() {
            if step % 2 == 0 {
                let (i, j) = basis[bpos];
                let x = flow[i * n + j];
                let better = x < theta
                    || (x == theta && bland && basis[bpos] < basis[leave_pos]);
                if better {
                    theta = x;
                    leave_pos = bpos;
                }
            }
        }
        let theta = theta.max(0.0);
        for (step, &bpos) in path.iter().enumerate() {
            let (i, j) = basis[bpos];
            let k = i * n + j;
            if step % 2 == 0 {
                flow[k] = (flow[k] - theta).max(0.0);
            } else {
                flow[k] += theta;
            }
        }
        flow[ei * n + ej] += theta;
        let (li, lj) = basis[leave_pos];
        flow[li * n + lj] = 0.0;
        in_basis[li * n + lj] = false;
        in_basis[ei * n + ej] = true;
        basis[leave_pos] = (ei, ej);

        if theta <= 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        (u, v) = potentials(m, n, &basis, cost);
    }

    let value = flow.iter().zip(cost).map(|(x, c)| if *x > 0.0 { x * c } else { 0.0 }).sum();
    TransportSolution {
        n,
        flow,
        basis,
        row_potential: u,
        col_potential: v,
        value,
    }
}

fn northwest_corner(supply: &[f64], demand: &[f64]) -> (Vec<f64>, Vec<(usize, usize)>) {
    let m = supply.len();
    let n = demand.len();
    let mut flow = vec![0.0; m * n];
    let mut basis = Vec::with_capacity(m + n - 1);
    let mut rs = supply.to_vec();
    let mut cs = demand.to_vec();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let x = rs[i].min(cs[j]).max(0.0);
        flow[i * n + j] = x;
        basis.push((i, j));
        rs[i] -= x;
        cs[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || rs[i] <= cs[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    // Round-off from unequal totals lands on the last cell.
    let last = (m - 1) * n + (n - 1);
    flow[last] = flow[last].max(0.0);
    (flow, basis)
}

/// Adjacency of the basis tree: node ids are rows `0..m` and columns `m..m+n`.
fn tree_adjacency(m: usize, n: usize, basis: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::with_capacity(4); m + n];
    for (pos, &(i, j)) in basis.iter().enumerate() {
        adj[i].push((m + j, pos));
        adj[m + j].push((i, pos));
    }
    adj
}

fn potentials(m: usize, n: usize, basis: &[(usize, usize)], cost: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let adj = tree_adjacency(m, n, basis);
    let mut pot = vec![f64::NAN; m + n];
    let mut queue = std::collections::VecDeque::new();
    pot[0] = 0.0;
    queue.push_back(0usize);
    while let Some(node) = queue.pop_front() {
        for &(next, pos) in &adj[node] {
            if pot[next].is_nan() {
                let (i, j) = basis[pos];
                pot[next] = cost[i * n + j] - pot[node];
                queue.push_back(next);
            }
        }
    }
    debug_assert!(pot.iter().all(|p| !p.is_nan()), "basis is not a spanning tree");
    let v = pot.split_off(m);
    (pot, v)
}

/// Basis positions along the unique tree path from `from` to `to`.
fn tree_path(m: usize, n: usize, basis: &[(usize, usize)], from: usize, to: usize) -> Vec<usize> {
    let adj = tree_adjacency(m, n, basis);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    let mut queue = std::collections::VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &(next, pos) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, pos));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let (prev, pos) = parent[node].expect("basis tree is disconnected");
        path.push(pos);
        node = prev;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_three_by_four() {
        // Textbook instance with optimum 435.
        let supply = [15.0, 25.0, 10.0];
        let demand = [5.0, 15.0, 15.0, 15.0];
        let cost = [
            10.0, 2.0, 20.0, 11.0, //
            12.0, 7.0, 9.0, 20.0, //
            4.0, 14.0, 16.0, 18.0,
        ];
        let sol = solve(&supply, &demand, &cost, None, None);
        assert!((sol.value - 435.0).abs() < 1e-9, "{}", sol.value);
        for i in 0..3 {
            let s: f64 = (0..4).map(|j| sol.flow[i * 4 + j]).sum();
            assert!((s - supply[i]).abs() < 1e-9);
        }
        for (i, j) in sol.basis.iter().copied() {
            assert!(sol.reduced_cost(&cost, i, j).abs() < 1e-9);
        }
    }

    #[test]
    fn single_cell() {
        let sol = solve(&[1.0], &[1.0], &[3.5], None, None);
        assert_eq!(sol.flow, vec![1.0]);
        assert_eq!(sol.value, 3.5);
    }

    #[test]
    fn degenerate_identity() {
        let w = [0.25; 4];
        let cost: Vec<f64> = (0..16).map(|k| if k / 4 == k % 4 { 0.0 } else { 1.0 }).collect();
        let sol = solve(&w, &w, &cost, None, None);
        assert!(sol.value.abs() < 1e-15);
    }
}
