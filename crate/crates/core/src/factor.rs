//! Factor maps between networks and the couplings they induce.
//!
//! A surjection `f : U → V` is a factor map from `G₁` to `G₂` when the
//! fiber-aggregated weights out of every `u ∈ f⁻¹(v)` reproduce the row of
//! `v` in `G₂` up to the scale `d₁(u)/d₂(v)`. Equivalently `PF = FQ` for the
//! indicator matrix `F`.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::network::{Network, VertexAttributes};
use crate::otc::TransitionCoupling;

/// Default relative tolerance of [`verify_factor`].
pub const FACTOR_TOL: f64 = 1e-9;

/// A total, surjective map `f : U → V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorMap {
    mapping: Vec<usize>,
    target_size: usize,
}

impl FactorMap {
    /// Checks that every image lies in `0..target_size` and every target
    /// vertex has a nonempty fiber.
    pub fn new(mapping: Vec<usize>, target_size: usize) -> Result<Self> {
        let mut hit = vec![false; target_size];
        for &v in &mapping {
            if v >= target_size {
                return Err(Error::IndexOutOfRange { index: v, n: target_size });
            }
            hit[v] = true;
        }
        if let Some(missing) = hit.iter().position(|h| !h) {
            return Err(Error::NotSurjective { missing });
        }
        Ok(FactorMap { mapping, target_size })
    }

    pub fn identity(n: usize) -> Self {
        FactorMap {
            mapping: (0..n).collect(),
            target_size: n,
        }
    }

    pub fn apply(&self, u: usize) -> usize {
        self.mapping[u]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn source_size(&self) -> usize {
        self.mapping.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// `f⁻¹(v)` in increasing order.
    pub fn fiber(&self, v: usize) -> Vec<usize> {
        (0..self.mapping.len()).filter(|&u| self.mapping[u] == v).collect()
    }

    /// `F(u,v) = 1` iff `f(u) = v`.
    pub fn indicator(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.mapping.len(), self.target_size, |u, v| {
            if self.mapping[u] == v {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `(pF)(v) = Σ_{u ∈ f⁻¹(v)} p(u)`.
    pub fn push_forward(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.target_size];
        for (u, &x) in p.iter().enumerate() {
            q[self.mapping[u]] += x;
        }
        q
    }

    fn check_sizes(&self, g1: &Network, g2: &Network) -> Result<()> {
        if self.mapping.len() != g1.n() {
            return Err(Error::DimensionMismatch {
                expected: g1.n(),
                found: self.mapping.len(),
            });
        }
        if self.target_size != g2.n() {
            return Err(Error::DimensionMismatch {
                expected: g2.n(),
                found: self.target_size,
            });
        }
        Ok(())
    }
}

/// Outcome of [`verify_factor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorCheck {
    /// Both forms of the condition hold within tolerance.
    pub exact: bool,
    /// Largest `|Σ_{u'∈f⁻¹(v')} w₁(u,u') − d₁(u)/d₂(v)·w₂(v,v')|`.
    pub max_violation: f64,
    /// Largest entry of `|PF − FQ|`.
    pub kernel_violation: f64,
}

/// Checks the weight identity and its kernel form `PF = FQ`.
///
/// `tol` is relative: weight violations are compared against
/// `tol · max_u d₁(u)` and kernel violations against `tol`.
pub fn verify_factor(g1: &Network, g2: &Network, f: &FactorMap, tol: f64) -> Result<FactorCheck> {
    f.check_sizes(g1, g2)?;
    let d1 = g1.degrees();
    let d2 = g2.degrees();
    let (n1, n2) = (g1.n(), g2.n());
    let mut aggregated = DMatrix::<f64>::zeros(n1, n2);
    for (u, u2, w) in g1.edges() {
        aggregated[(u, f.apply(u2))] += w;
    }
    let mut max_violation: f64 = 0.0;
    let mut kernel_violation: f64 = 0.0;
    for u in 0..n1 {
        let v = f.apply(u);
        for v2 in 0..n2 {
            let target = d1[u] / d2[v] * g2.weight(v, v2);
            max_violation = max_violation.max((aggregated[(u, v2)] - target).abs());
            let pf = aggregated[(u, v2)] / d1[u];
            let fq = g2.weight(v, v2) / d2[v];
            kernel_violation = kernel_violation.max((pf - fq).abs());
        }
    }
    let scale = d1.iter().cloned().fold(0.0, f64::max);
    Ok(FactorCheck {
        exact: max_violation <= tol * scale && kernel_violation <= tol,
        max_violation,
        kernel_violation,
    })
}

fn require_factor(g1: &Network, g2: &Network, f: &FactorMap) -> Result<()> {
    let check = verify_factor(g1, g2, f, FACTOR_TOL)?;
    if check.exact {
        Ok(())
    } else {
        Err(Error::NotAFactor {
            max_violation: check.max_violation,
        })
    }
}

/// The deterministic coupling `(X, f(X))`.
///
/// On the graph `{(u, f(u))}` the kernel moves as `P` does, carrying `v`
/// along as `f(u')`; the remaining states get independent rows.
pub fn factor_coupling(g1: &Network, g2: &Network, f: &FactorMap) -> Result<TransitionCoupling> {
    require_factor(g1, g2, f)?;
    if !g1.is_strongly_connected() || !g2.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let p = g1.transition_kernel()?;
    let q = g2.transition_kernel()?;
    let pl = p.stationary_distribution()?;
    let (n1, n2) = (p.n(), q.n());
    let mut rows = Vec::with_capacity(n1 * n2);
    let mut law = vec![0.0; n1 * n2];
    for u in 0..n1 {
        for v in 0..n2 {
            if f.apply(u) == v {
                law[u * n2 + v] = pl.probs()[u];
                rows.push(p.support(u).into_iter().map(|(a, pa)| (a * n2 + f.apply(a), pa)).collect());
            } else {
                rows.push(crate::otc::independent_row(&p, &q, u, v));
            }
        }
    }
    TransitionCoupling::from_parts(n1, n2, rows, law)
}

/// Whether `c(u, f(u)) ≤ c(u, v)` for every `u` and `v`.
pub fn check_cost_compatible(cost: &DMatrix<f64>, f: &FactorMap) -> bool {
    if cost.nrows() != f.source_size() || cost.ncols() != f.target_size() {
        return false;
    }
    (0..cost.nrows()).all(|u| {
        let own = cost[(u, f.apply(u))];
        cost.row(u).iter().all(|&c| own <= c)
    })
}

/// Coupling of the walks on `G₁` and `G₂` that is conditionally independent
/// given their common factor `G₃`, so that `f(X̃) = g(Ỹ)` almost surely.
///
/// On `{f(u) = g(v) = w}` the law is `p(u)q(v)/z(w)` and the kernel is
/// `P(u'|u)·Q(v'|v)/Z(w'|w)`; states off that set get independent rows.
/// The product law is stationary for reversible walks. When it is not (some
/// directed inputs), the stationary law of the first recurrent class of the
/// kernel inside `{f(u) = g(v)}` is used instead.
pub fn relatively_independent_coupling(
    g1: &Network,
    g2: &Network,
    g3: &Network,
    f: &FactorMap,
    g: &FactorMap,
) -> Result<TransitionCoupling> {
    if f.target_size() != g3.n() || g.target_size() != g3.n() {
        return Err(Error::CommonFactorMismatch);
    }
    require_factor(g1, g3, f)?;
    require_factor(g2, g3, g)?;
    for net in [g1, g2, g3] {
        if !net.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
    }
    let p = g1.transition_kernel()?;
    let q = g2.transition_kernel()?;
    let z = g3.transition_kernel()?;
    let pl = p.stationary_distribution()?.into_vec();
    let ql = q.stationary_distribution()?.into_vec();
    let zl = z.stationary_distribution()?.into_vec();
    let (n1, n2) = (p.n(), q.n());
    let mut rows = Vec::with_capacity(n1 * n2);
    let mut law = vec![0.0; n1 * n2];
    for u in 0..n1 {
        for v in 0..n2 {
            let w = f.apply(u);
            if w != g.apply(v) {
                rows.push(crate::otc::independent_row(&p, &q, u, v));
                continue;
            }
            law[u * n2 + v] = pl[u] * ql[v] / zl[w];
            let qs = q.support(v);
            let row = p
                .support(u)
                .into_iter()
                .flat_map(|(a, pa)| {
                    let wa = f.apply(a);
                    let za = z.prob(w, wa);
                    qs.iter()
                        .filter(move |&&(b, _)| g.apply(b) == wa)
                        .map(move |&(b, qb)| (a * n2 + b, pa * qb / za))
                })
                .collect();
            rows.push(row);
        }
    }
    let coupling = TransitionCoupling::from_parts(n1, n2, rows.clone(), law)?;
    if coupling.stationarity_residual() <= 1e-12 {
        return Ok(coupling);
    }
    let on_fibers = |s: usize| f.apply(s / n2) == g.apply(s % n2);
    let class = coupling
        .recurrent_classes()
        .into_iter()
        .find(|c| c.iter().all(|&s| on_fibers(s)))
        .expect("the fiber diagonal is closed and nonempty");
    let local = DMatrix::from_fn(class.len(), class.len(), |i, j| coupling.prob(class[i], class[j]));
    let pi = MarkovKernel::from_normalized(local).stationary_distribution()?;
    let mut law = vec![0.0; n1 * n2];
    for (&s, &x) in class.iter().zip(pi.probs()) {
        law[s] = x;
    }
    TransitionCoupling::from_parts(n1, n2, rows, law)
}

/// A generated extension/factor pair with Euclidean embeddings.
#[derive(Debug, Clone)]
pub struct FactorPair {
    /// Extension with `b·m` vertices; fiber `i` is `i·m .. (i+1)·m`.
    pub g1: Network,
    /// Factor with `b` vertices, complete with loops.
    pub g2: Network,
    pub map: FactorMap,
    pub embedding1: Vec<Vec<f64>>,
    pub embedding2: Vec<Vec<f64>>,
}

/// Parameters of [`generate_factor_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorPairSpec {
    pub blocks: usize,
    pub per_block: usize,
    pub sigma: f64,
    pub directed: bool,
    /// Relative slack of the approximate factor condition; `0` for exact.
    pub epsilon: f64,
}

/// Embedding dimension of generated pairs.
pub const FACTOR_EMBEDDING_DIM: usize = 5;

const GENERATION_ATTEMPTS: usize = 100;

/// Random extension `G₁` of a random factor `G₂`.
///
/// `G₂` has `b` vertices at `N(0, σ²I₅)` and integer weights in `1..=10` on
/// every ordered pair (loops included, symmetric when undirected). Fiber `i`
/// of `G₁` holds `m` points drawn from `N(V_i, I₅)`. Each `u` gets a weight
/// `k_u` (fiber totals all equal `m`) and the block of `G₁` between fibers
/// `v` and `v'` is `w₂(v,v')` times a random positive matrix with row sums
/// `k_u`; in the undirected case it is scaled to column sums `k_{u'}` as
/// well, which keeps `G₁` symmetric. Then `d₁(u) = k_u·d₂(v)` and the
/// factor identity holds.
///
/// With `ε > 0` every weight is multiplied by `1 + (ε/3)·η` where `η ∈ [−1,1]`
/// is random, symmetric when undirected, and has zero `w`-weighted mean on
/// each fiber block, so block totals and thus the aggregate identity are
/// kept while each fiber row stays within the `(1 ± ε)` band.
pub fn generate_factor_pair(spec: FactorPairSpec, seed: u64) -> Result<FactorPair> {
    let FactorPairSpec {
        blocks: b,
        per_block: m,
        sigma,
        epsilon,
        ..
    } = spec;
    if b == 0 || m == 0 {
        return Err(Error::InvalidParameter("blocks and per_block must be at least 1".into()));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must lie in [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_ATTEMPTS {
        let pair = draw_factor_pair(&mut rng, spec)?;
        if pair.g1.is_strongly_connected() && pair.g2.is_strongly_connected() {
            return Ok(pair);
        }
    }
    Err(Error::GenerationFailed {
        attempts: GENERATION_ATTEMPTS,
    })
}

fn draw_factor_pair(rng: &mut ChaCha8Rng, spec: FactorPairSpec) -> Result<FactorPair> {
    let FactorPairSpec {
        blocks: b,
        per_block: m,
        sigma,
        directed,
        epsilon,
    } = spec;
    let n1 = b * m;

    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    let embedding2: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..FACTOR_EMBEDDING_DIM).map(|_| sigma * normal(rng)).collect())
        .collect();
    let embedding1: Vec<Vec<f64>> = (0..n1)
        .map(|u| embedding2[u / m].iter().map(|c| c + normal(rng)).collect())
        .collect();

    let mut w2 = DMatrix::<f64>::zeros(b, b);
    for v in 0..b {
        for v2 in 0..b {
            if directed || v2 >= v {
                let w = rng.random_range(1..=10) as f64;
                w2[(v, v2)] = w;
                if !directed {
                    w2[(v2, v)] = w;
                }
            }
        }
    }

    // Fiber weights k_u: m times a flat Dirichlet draw inside each fiber.
    let mut k = vec![0.0; n1];
    for v in 0..b {
        let draws: Vec<f64> = (0..m).map(|_| positive_exp(rng)).collect();
        let total: f64 = draws.iter().sum();
        for (i, d) in draws.into_iter().enumerate() {
            k[v * m + i] = m as f64 * d / total;
        }
    }

    let mut w1 = DMatrix::<f64>::zeros(n1, n1);
    for v in 0..b {
        for v2 in 0..b {
            if !directed && v2 < v {
                continue;
            }
            let rows = &k[v * m..(v + 1) * m];
            let cols = &k[v2 * m..(v2 + 1) * m];
            let base = DMatrix::from_fn(m, m, |_, _| positive_exp(rng));
            let block = if directed {
                row_scaled(&base, rows)
            } else if v == v2 {
                let sym = (&base + base.transpose()) * 0.5;
                let plan = scale_to_marginals(&sym, rows, cols);
                (&plan + plan.transpose()) * 0.5
            } else {
                scale_to_marginals(&base, rows, cols)
            };
            for i in 0..m {
                for j in 0..m {
                    let w = w2[(v, v2)] * block[(i, j)];
                    w1[(v * m + i, v2 * m + j)] = w;
                    if !directed {
                        w1[(v2 * m + j, v * m + i)] = w;
                    }
                }
            }
        }
    }

    if epsilon > 0.0 {
        perturb_blocks(rng, &mut w1, b, m, directed, epsilon / 3.0);
    }

    let g1 = Network::from_weight_matrix(w1, directed)?.with_attributes(VertexAttributes {
        labels: None,
        embedding: Some(embedding1.clone()),
    })?;
    let g2 = Network::from_weight_matrix(w2, directed)?.with_attributes(VertexAttributes {
        labels: None,
        embedding: Some(embedding2.clone()),
    })?;
    let map = FactorMap::new((0..n1).map(|u| u / m).collect(), b)?;
    Ok(FactorPair {
        g1,
        g2,
        map,
        embedding1,
        embedding2,
    })
}

/// Exponential draw bounded away from zero so scaled weights stay positive.
fn positive_exp(rng: &mut ChaCha8Rng) -> f64 {
    let x: f64 = Exp1.sample(rng);
    x.max(1e-3)
}

fn row_scaled(base: &DMatrix<f64>, rows: &[f64]) -> DMatrix<f64> {
    let mut out = base.clone();
    for (i, &r) in rows.iter().enumerate() {
        let s: f64 = base.row(i).sum();
        out.row_mut(i).scale_mut(r / s);
    }
    out
}

/// Diagonal scaling `diag(x)·A·diag(y)` with the given row and column sums.
/// Both targets must have the same total.
fn scale_to_marginals(a: &DMatrix<f64>, rows: &[f64], cols: &[f64]) -> DMatrix<f64> {
    let mut plan = a.clone();
    for _ in 0..10_000 {
        for (j, &c) in cols.iter().enumerate() {
            let s: f64 = plan.column(j).sum();
            plan.column_mut(j).scale_mut(c / s);
        }
        let mut err: f64 = 0.0;
        for (i, &r) in rows.iter().enumerate() {
            let s: f64 = plan.row(i).sum();
            err = err.max((s - r).abs() / r);
            plan.row_mut(i).scale_mut(r / s);
        }
        if err < 1e-15 {
            break;
        }
    }
    plan
}

fn perturb_blocks(rng: &mut ChaCha8Rng, w1: &mut DMatrix<f64>, b: usize, m: usize, directed: bool, amplitude: f64) {
    for v in 0..b {
        for v2 in 0..b {
            if !directed && v2 < v {
                continue;
            }
            let cells: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| (0..m).map(move |j| (v * m + i, v2 * m + j)))
                .filter(|&(x, y)| directed || v != v2 || x <= y)
                .collect();
            // Symmetric diagonal blocks count off-diagonal cells twice.
            let mult = |(x, y): (usize, usize)| if !directed && v == v2 && x != y { 2.0 } else { 1.0 };
            let eta: Vec<f64> = cells.iter().map(|_| rng.random_range(-0.5..0.5)).collect();
            let mass: f64 = cells.iter().map(|&c| mult(c) * w1[c]).sum();
            let mean: f64 = cells.iter().zip(&eta).map(|(&c, e)| mult(c) * w1[c] * e).sum::<f64>() / mass;
            for (&(x, y), e) in cells.iter().zip(&eta) {
                let w = w1[(x, y)] * (1.0 + amplitude * (e - mean));
                w1[(x, y)] = w;
                if !directed {
                    w1[(y, x)] = w;
                }
            }
        }
    }
}

/// `max_v |(pF)(v) − q(v)|` for the stationary laws of `P` and `Q`.
pub fn push_forward_error(p: &MarkovKernel, q: &MarkovKernel, f: &FactorMap) -> Result<f64> {
    let pl = p.stationary_distribution()?;
    let ql = q.stationary_distribution()?;
    let pushed = f.push_forward(pl.probs());
    Ok(pushed
        .iter()
        .zip(ql.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
