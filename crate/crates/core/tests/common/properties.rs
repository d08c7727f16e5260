//! Property checks shared by the proptest suites and the acceptance target.
//! Each takes a seed and returns a description of the first failure.

use nalgebra::DMatrix;
use netotc::cost::zero_one_identity;
use netotc::factor::{factor_coupling, generate_factor_pair, relatively_independent_coupling, FactorPairSpec};
use netotc::otc::{multistep_average_cost, verify_lower_bounds};
use netotc::{networks_equivalent, ot_exact, solve_exact_otc, CostMatrix, Network};
use rand::RngExt;

use super::{random_cost_matrix, random_strong_network, rng};

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pair(seed: u64) -> (Network, Network, CostMatrix) {
    let mut r = rng(seed);
    let n1 = r.random_range(2..=5);
    let n2 = r.random_range(2..=5);
    let directed = r.random_bool(0.5);
    let g1 = random_strong_network(&mut r, n1, directed, 0.3);
    let g2 = random_strong_network(&mut r, n2, directed, 0.3);
    let c = random_cost_matrix(&mut r, n1, n2);
    (g1, g2, c)
}

/// Marginal identities of the optimal coupling within `1e-9` and
/// stationarity within `1e-8`.
pub fn coupling_marginals(seed: u64) -> Check {
    let (g1, g2, c) = random_pair(seed);
    let sol = solve_exact_otc(&g1, &g2, &c).map_err(|e| e.to_string())?;
    let p = g1.transition_kernel().unwrap();
    let q = g2.transition_kernel().unwrap();
    let viol = sol.coupling.marginal_violation(&p, &q).unwrap();
    ensure(viol <= 1e-9, || format!("marginal violation {viol:e}"))?;
    let res = sol.coupling.stationarity_residual();
    ensure(res <= 1e-8, || format!("stationarity residual {res:e}"))?;
    let mass: f64 = sol.vertex_alignment.iter().sum();
    ensure((mass - 1.0).abs() <= 1e-9, || format!("π_v mass {mass}"))?;
    let emass: f64 = sol.edge_alignment.iter().map(|e| e.mass).sum();
    ensure((emass - 1.0).abs() <= 1e-9, || format!("π_e mass {emass}"))
}

/// Every atom of `π_e` sits on an edge of both networks.
pub fn edge_preservation(seed: u64) -> Check {
    let (g1, g2, c) = random_pair(seed);
    let sol = solve_exact_otc(&g1, &g2, &c).map_err(|e| e.to_string())?;
    for e in &sol.edge_alignment {
        if e.mass > 0.0 {
            ensure(g1.has_edge(e.edge1.0, e.edge1.1) && g2.has_edge(e.edge2.0, e.edge2.1), || {
                format!("mass {} on {:?} × {:?}", e.mass, e.edge1, e.edge2)
            })?;
        }
    }
    Ok(())
}

/// `ρ ≥ OT(p, q)` for any pair, plus the degree, weight and marginal bounds
/// for undirected pairs on one vertex set with equal total degree.
pub fn lower_bounds(seed: u64) -> Check {
    let (g1, g2, c) = random_pair(seed);
    let sol = solve_exact_otc(&g1, &g2, &c).map_err(|e| e.to_string())?;
    let p = g1.transition_kernel().unwrap().stationary_distribution().unwrap();
    let q = g2.transition_kernel().unwrap().stationary_distribution().unwrap();
    let (_, ot) = ot_exact(p.probs(), q.probs(), c.values()).unwrap();
    ensure(sol.rho >= ot - 1e-9, || format!("ρ {} below OT {ot}", sol.rho))?;

    let mut r = rng(seed ^ 0x5eed);
    let n = r.random_range(2..=5);
    let h1 = random_strong_network(&mut r, n, false, 0.4);
    let h2 = random_strong_network(&mut r, n, false, 0.4);
    let h2 = h2.scaled(h1.total_degree() / h2.total_degree()).unwrap();
    let cost = zero_one_identity(n);
    let sol = solve_exact_otc(&h1, &h2, &cost).map_err(|e| e.to_string())?;
    let report = verify_lower_bounds(&h1, &h2, &cost, &sol).map_err(|e| e.to_string())?;
    ensure(report.holds, || format!("{report:?}"))
}

/// Symmetry, the triangle inequality and `ρ = 0 ⇔ G₁ ∼ G₂` for undirected
/// networks on one vertex set under the zero-one cost.
pub fn metric(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.random_range(2..=5);
    let gs: Vec<Network> = (0..3).map(|_| random_strong_network(&mut r, n, false, 0.4)).collect();
    let cost = zero_one_identity(n);
    let rho = |a: &Network, b: &Network| solve_exact_otc(a, b, &cost).map(|s| s.rho).map_err(|e| e.to_string());
    let (r01, r10) = (rho(&gs[0], &gs[1])?, rho(&gs[1], &gs[0])?);
    ensure((r01 - r10).abs() <= 1e-7, || format!("asymmetric: {r01} vs {r10}"))?;
    let (r12, r02) = (rho(&gs[1], &gs[2])?, rho(&gs[0], &gs[2])?);
    ensure(r02 <= r01 + r12 + 1e-7, || format!("triangle: {r02} > {r01} + {r12}"))?;

    let scaled = gs[0].scaled(r.random_range(0.2..5.0)).unwrap();
    let r_eq = rho(&gs[0], &scaled)?;
    ensure(r_eq <= 1e-8, || format!("equivalent pair at ρ = {r_eq}"))?;
    for (a, b, rab) in [(&gs[0], &gs[1], r01), (&gs[0], &gs[2], r02), (&gs[1], &gs[2], r12)] {
        let eq = networks_equivalent(a, b).unwrap();
        ensure(eq == (rab <= 1e-8), || format!("equivalent = {eq} but ρ = {rab}"))?;
    }
    // One reweighted edge, which breaks equivalence unless it is the only one.
    let mut w = gs[0].weights().clone();
    let (u, v, wt) = gs[0].edges().next().unwrap();
    w[(u, v)] = 2.0 * wt;
    w[(v, u)] = 2.0 * wt;
    let bent = Network::from_weight_matrix(w, false).unwrap();
    let r_bent = rho(&gs[0], &bent)?;
    let eq = networks_equivalent(&gs[0], &bent).unwrap();
    ensure(eq == (r_bent <= 1e-8), || format!("reweighted: equivalent = {eq} but ρ = {r_bent}"))
}

/// `ρ` and `π_v` are unchanged when either network is rescaled.
pub fn scaling_invariance(seed: u64) -> Check {
    let (g1, g2, c) = random_pair(seed);
    let mut r = rng(seed ^ 0xc0ffee);
    let base = solve_exact_otc(&g1, &g2, &c).map_err(|e| e.to_string())?;
    let s1 = g1.scaled(r.random_range(0.1..10.0)).unwrap();
    let s2 = g2.scaled(r.random_range(0.1..10.0)).unwrap();
    for (a, b) in [(&s1, &g2), (&g1, &s2)] {
        let sol = solve_exact_otc(a, b, &c).map_err(|e| e.to_string())?;
        ensure((sol.rho - base.rho).abs() <= 1e-9, || format!("ρ {} vs {}", sol.rho, base.rho))?;
        let gap = (&sol.vertex_alignment - &base.vertex_alignment).abs().max();
        ensure(gap <= 1e-9, || format!("π_v moved by {gap:e}"))?;
    }
    Ok(())
}

/// `E c_k = ρ` for `k = 1, 2, 5`.
pub fn multistep(seed: u64) -> Check {
    let (g1, g2, c) = random_pair(seed);
    let sol = solve_exact_otc(&g1, &g2, &c).map_err(|e| e.to_string())?;
    for k in [1, 2, 5] {
        let m = multistep_average_cost(&sol, c.values(), k).unwrap();
        ensure((m.unrolled - sol.rho).abs() <= 1e-9, || format!("k={k}: {} vs ρ {}", m.unrolled, sol.rho))?;
    }
    Ok(())
}

fn small_factor_spec(r: &mut impl rand::Rng, directed: bool) -> FactorPairSpec {
    FactorPairSpec {
        blocks: r.random_range(1..=4),
        per_block: r.random_range(1..=4),
        sigma: 2.5,
        directed,
        epsilon: 0.0,
    }
}

/// For generated exact factors, `pF = q` and `PF = FQ` within `1e-10`.
pub fn factor_pushforward(seed: u64) -> Check {
    let mut r = rng(seed);
    let directed = r.random_bool(0.5);
    let spec = small_factor_spec(&mut r, directed);
    let pair = generate_factor_pair(spec, seed).map_err(|e| e.to_string())?;
    let p = pair.g1.transition_kernel().unwrap();
    let q = pair.g2.transition_kernel().unwrap();
    let err = netotc::factor::push_forward_error(&p, &q, &pair.map).unwrap();
    ensure(err <= 1e-10, || format!("|pF − q| = {err:e}"))?;
    let f = pair.map.indicator();
    let gap = (p.matrix() * &f - &f * q.matrix()).abs().max();
    ensure(gap <= 1e-10, || format!("|PF − FQ| = {gap:e}"))
}

/// The relatively independent coupling over a common factor is a stationary
/// transition coupling supported on `{f(u) = g(v)}`.
pub fn relatively_independent(seed: u64) -> Check {
    let mut r = rng(seed);
    let directed = r.random_bool(0.5);
    let spec = small_factor_spec(&mut r, directed);
    let a = generate_factor_pair(spec, seed).map_err(|e| e.to_string())?;
    // The second extension of G₃ is either G₁ again or G₃ itself.
    let other_is_factor = r.random_bool(0.5);
    let (g2, g) = if other_is_factor {
        (a.g2.clone(), netotc::factor::FactorMap::identity(a.g2.n()))
    } else {
        (a.g1.clone(), a.map.clone())
    };
    let coupling = relatively_independent_coupling(&a.g1, &g2, &a.g2, &a.map, &g).map_err(|e| e.to_string())?;
    let p = a.g1.transition_kernel().unwrap();
    let q = g2.transition_kernel().unwrap();
    let viol = coupling.marginal_violation(&p, &q).unwrap();
    ensure(viol <= 1e-9, || format!("marginal violation {viol:e}"))?;
    let res = coupling.stationarity_residual();
    ensure(res <= 1e-8, || format!("stationarity residual {res:e}"))?;
    let mass: f64 = coupling.stationary_law().iter().sum();
    ensure((mass - 1.0).abs() <= 1e-9, || format!("law mass {mass}"))?;
    for (s, &l) in coupling.stationary_law().iter().enumerate() {
        let (u, v) = coupling.pair(s);
        ensure(l <= 0.0 || a.map.apply(u) == g.apply(v), || format!("mass {l} on ({u}, {v})"))?;
        if l > 0.0 {
            for &(t, _) in coupling.row(s) {
                let (u2, v2) = coupling.pair(t);
                ensure(a.map.apply(u2) == g.apply(v2), || format!("({u},{v}) moves off the fibers to ({u2},{v2})"))?;
            }
        }
    }
    Ok(())
}

/// For extensions `G₁ → H₁` and `G₂ → H₂` and a cost on `H₁ × H₂` lifted
/// through the maps, both levels have the same optimal cost.
pub fn two_factor_lift(seed: u64) -> Check {
    let mut r = rng(seed);
    let directed = r.random_bool(0.5);
    let mut spec = small_factor_spec(&mut r, directed);
    spec.blocks = r.random_range(1..=3);
    spec.per_block = r.random_range(1..=3);
    let a = generate_factor_pair(spec, seed).map_err(|e| e.to_string())?;
    spec.blocks = r.random_range(1..=3);
    spec.per_block = r.random_range(1..=3);
    let b = generate_factor_pair(spec, seed.wrapping_add(1)).map_err(|e| e.to_string())?;
    let c = super::random_cost(&mut r, a.g2.n(), b.g2.n());
    let lifted = DMatrix::from_fn(a.g1.n(), b.g1.n(), |u, v| c[(a.map.apply(u), b.map.apply(v))]);
    let top = solve_exact_otc(&a.g1, &b.g1, &CostMatrix::custom(lifted).unwrap()).map_err(|e| e.to_string())?;
    let base = solve_exact_otc(&a.g2, &b.g2, &CostMatrix::custom(c.clone()).unwrap()).map_err(|e| e.to_string())?;
    // Push the extension-level law down through (f, g).
    let mut pushed = DMatrix::<f64>::zeros(a.g2.n(), b.g2.n());
    for u in 0..a.g1.n() {
        for v in 0..b.g1.n() {
            pushed[(a.map.apply(u), b.map.apply(v))] += top.vertex_alignment[(u, v)];
        }
    }
    let pushed_cost = pushed.component_mul(&c).sum();
    ensure((pushed_cost - base.rho).abs() <= 1e-7, || {
        format!("pushed-forward cost {pushed_cost} vs factor-level ρ {}", base.rho)
    })?;
    ensure((top.rho - base.rho).abs() <= 1e-7, || format!("ρ {} vs {}", top.rho, base.rho))
}

/// Exact factor and compatible cost: the factor coupling is optimal and the
/// solver puts no mass off the graph of `f`.
pub fn compatible_factor_optimality(seed: u64) -> Check {
    let mut r = rng(seed);
    let directed = r.random_bool(0.5);
    let spec = small_factor_spec(&mut r, directed);
    let pair = generate_factor_pair(spec, seed).map_err(|e| e.to_string())?;
    let (n1, n2) = (pair.g1.n(), pair.g2.n());
    let values = DMatrix::from_fn(n1, n2, |u, v| {
        if pair.map.apply(u) == v {
            r.random_range(0.0..0.5)
        } else {
            r.random_range(0.5..1.0)
        }
    });
    ensure(netotc::factor::check_cost_compatible(&values, &pair.map), || "cost not compatible".into())?;
    let cost = CostMatrix::custom(values.clone()).unwrap();
    let sol = solve_exact_otc(&pair.g1, &pair.g2, &cost).map_err(|e| e.to_string())?;
    let p = pair.g1.transition_kernel().unwrap().stationary_distribution().unwrap();
    let predicted: f64 = (0..n1).map(|u| p.probs()[u] * values[(u, pair.map.apply(u))]).sum();
    ensure((sol.rho - predicted).abs() <= 1e-7, || format!("ρ {} vs Σ c(u,f(u))p(u) = {predicted}", sol.rho))?;
    let off: f64 = (0..n1)
        .flat_map(|u| (0..n2).map(move |v| (u, v)))
        .filter(|&(u, v)| pair.map.apply(u) != v)
        .map(|(u, v)| sol.vertex_alignment[(u, v)])
        .sum();
    ensure(off <= 1e-6, || format!("off-fiber mass {off:e}"))?;
    let fc = factor_coupling(&pair.g1, &pair.g2, &pair.map).unwrap();
    let fc_cost = fc.expected_cost(&values);
    ensure((fc_cost - predicted).abs() <= 1e-9, || format!("factor coupling cost {fc_cost}"))
}
