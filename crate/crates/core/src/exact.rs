//! Exact hitting-time statistics by linear algebra.
//!
//! Everything here is computed from the walk killed on entering the target
//! set: `K_z(x, y) = K(x, y) 1(x not in z)`. With a loss factor `beta` in
//! `(0, 1]` the Green kernel `G_beta = sum_k (beta K_z)^k` counts expected
//! visits of the lossy walk, and the three walk parameters are
//!
//! * `S_beta = E beta^T`, the chance the lossy walk reaches `z`,
//! * `R_beta = G_beta(o, o)`, expected visits to `o` (the start counts),
//! * `Gamma_beta = R_beta w_z / w_o`.
//!
//! Scalar quantities that diverge because the origin cannot reach the
//! targets are returned as `f64::INFINITY`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{KilledSystem, DENSE_LIMIT};

/// Sparse stochastic (or substochastic) kernel, rows indexed by vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Kernel {
    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x]
            .iter()
            .find(|&&(j, _)| j == y)
            .map(|&(_, p)| p)
            .unwrap_or(0.0)
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        self.rows[x].iter().map(|&(_, p)| p).sum()
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                m[(x, y)] = p;
            }
        }
        m
    }
}

/// K(x, y) = w(x, y) / w_x.
pub fn transition_kernel(graph: &WeightedGraph) -> Result<Kernel> {
    let rows = (0..graph.num_vertices())
        .map(|x| {
            let wx = graph.weight_of(x);
            if wx <= 0.0 {
                return Err(Error::ZeroVertexWeight(graph.label(x).to_string()));
            }
            Ok(graph
                .neighbors(x)
                .iter()
                .map(|&(y, w)| (y, w / wx))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Kernel { rows })
}

/// K_z: the transition kernel with target rows zeroed.
pub fn killed_kernel(graph: &WeightedGraph) -> Result<Kernel> {
    let rows = (0..graph.num_vertices())
        .map(|x| {
            if graph.is_target(x) {
                return Ok(Vec::new());
            }
            let wx = graph.weight_of(x);
            if wx <= 0.0 {
                return Err(Error::ZeroVertexWeight(graph.label(x).to_string()));
            }
            Ok(graph
                .neighbors(x)
                .iter()
                .map(|&(y, w)| (y, w / wx))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Kernel { rows })
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        domain(format!("beta = {beta} is outside (0, 1]"))
    }
}

/// Vertices that can reach the target set.
fn reaches_target(graph: &WeightedGraph) -> Vec<bool> {
    let mut seen = vec![false; graph.num_vertices()];
    let mut stack: Vec<usize> = graph.targets().to_vec();
    for &t in graph.targets() {
        seen[t] = true;
    }
    while let Some(u) = stack.pop() {
        for &(v, _) in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// The killed system on the origin's accessible component.
fn accessible_system(graph: &WeightedGraph, beta: f64) -> KilledSystem<'_> {
    let acc = graph.accessible();
    let states = (0..graph.num_vertices()).filter(|&x| acc[x]).collect();
    KilledSystem::new(graph, beta, states)
}

/// Full Green kernel `G_beta = (I - beta K_z)^{-1}`.
///
/// At `beta = 1` every vertex must be able to reach the targets, otherwise
/// expected visit counts are infinite and an error is returned.
pub fn green_kernel(graph: &WeightedGraph, beta: f64) -> Result<DMatrix<f64>> {
    check_beta(beta)?;
    let n = graph.num_vertices();
    if n > DENSE_LIMIT {
        return Err(Error::ResourceCap {
            needed: n,
            cap: DENSE_LIMIT,
            flag: "a smaller graph (the full Green kernel is dense)",
        });
    }
    if beta == 1.0 {
        let reach = reaches_target(graph);
        if let Some(x) = (0..n).find(|&x| !reach[x]) {
            return Err(Error::InfiniteExpectation(format!(
                "vertex `{}` cannot reach the targets",
                graph.label(x)
            )));
        }
    }
    let kz = killed_kernel(graph)?;
    let mut a = DMatrix::<f64>::identity(n, n);
    for x in 0..n {
        for &(y, p) in kz.row(x) {
            a[(x, y)] -= beta * p;
        }
    }
    a.try_inverse()
        .ok_or_else(|| Error::InfiniteExpectation("singular killed system".into()))
}

/// Row `G_beta(o, .)` of the Green kernel, over all vertices. The entry at a
/// target is the expected number of entries into that target.
pub fn green_row(graph: &WeightedGraph, beta: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    if beta == 1.0 && !graph.target_reachable() {
        return Err(Error::InfiniteExpectation(
            "targets unreachable from the origin".into(),
        ));
    }
    let sys = accessible_system(graph, beta);
    let mut rhs = vec![0.0; sys.len()];
    let o_pos = sys
        .states()
        .iter()
        .position(|&s| s == graph.origin())
        .expect("origin is accessible");
    rhs[o_pos] = 1.0;
    let u = sys.solve(&rhs, true)?;
    let mut row = vec![0.0; graph.num_vertices()];
    for (k, &x) in sys.states().iter().enumerate() {
        row[x] = u[k];
    }
    for (k, &x) in sys.states().iter().enumerate() {
        let wx = graph.weight_of(x);
        for &(y, w) in graph.neighbors(x) {
            if graph.is_target(y) {
                row[y] += u[k] * beta * w / wx;
            }
        }
    }
    Ok(row)
}

/// Exact E T_oz, infinite when the targets are unreachable.
pub fn expected_hitting_time(graph: &WeightedGraph) -> Result<f64> {
    Ok(hitting_moments(graph)?.0)
}

/// Exact (E T, E T^2).
pub fn hitting_moments(graph: &WeightedGraph) -> Result<(f64, f64)> {
    if !graph.target_reachable() {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let sys = accessible_system(graph, 1.0);
    let o_pos = sys
        .states()
        .iter()
        .position(|&s| s == graph.origin())
        .expect("origin is accessible");
    let h = sys.solve(&vec![1.0; sys.len()], false)?;
    let kh = sys.apply(&h);
    let rhs: Vec<f64> = kh.iter().map(|v| 1.0 + 2.0 * v).collect();
    let m2 = sys.solve(&rhs, false)?;
    Ok((h[o_pos], m2[o_pos]))
}

/// Var T_oz.
pub fn hitting_time_variance(graph: &WeightedGraph) -> Result<f64> {
    let (m1, m2) = hitting_moments(graph)?;
    Ok(m2 - m1 * m1)
}

/// `S_beta = E beta^T`.
pub fn survival_transform(graph: &WeightedGraph, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !graph.target_reachable() {
        return Ok(0.0);
    }
    let row = green_row(graph, beta)?;
    Ok(graph.targets().iter().map(|&t| row[t]).sum())
}

/// `R_beta = G_beta(o, o)`; at `beta = 1` this is `w_o r_oz`.
pub fn visits_r(graph: &WeightedGraph, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta == 1.0 && !graph.target_reachable() {
        return Ok(f64::INFINITY);
    }
    Ok(green_row(graph, beta)?[graph.origin()])
}

/// `Gamma_beta = R_beta w_z / w_o`.
pub fn gamma(graph: &WeightedGraph, beta: f64) -> Result<f64> {
    Ok(visits_r(graph, beta)? * graph.weight_ratio())
}

/// Effective resistance between the origin and the target set.
pub fn effective_resistance(graph: &WeightedGraph) -> Result<f64> {
    Ok(visits_r(graph, 1.0)? / graph.weight_of(graph.origin()))
}

/// The triple (S, R, Gamma) at one loss factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParameters {
    pub beta: f64,
    pub s: f64,
    pub r: f64,
    pub gamma: f64,
}

pub fn walk_parameters(graph: &WeightedGraph, beta: f64) -> Result<WalkParameters> {
    check_beta(beta)?;
    if !graph.target_reachable() {
        let r = if beta == 1.0 {
            f64::INFINITY
        } else {
            green_row(graph, beta)?[graph.origin()]
        };
        return Ok(WalkParameters {
            beta,
            s: 0.0,
            r,
            gamma: r * graph.weight_ratio(),
        });
    }
    let row = green_row(graph, beta)?;
    let r = row[graph.origin()];
    Ok(WalkParameters {
        beta,
        s: graph.targets().iter().map(|&t| row[t]).sum(),
        r,
        gamma: r * graph.weight_ratio(),
    })
}

/// Truncated hitting-time law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    #[serde(with = "crate::report::extended_f64")]
    pub expected_t: f64,
    /// `pmf[k] = P(T = k)` for `k = 0..=horizon`.
    pub pmf: Vec<f64>,
    /// `P(T > horizon)`.
    pub survival_mass: f64,
    /// `(beta, S_beta)` pairs.
    pub transform_samples: Vec<(f64, f64)>,
}

impl HittingStats {
    pub fn horizon(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `P(T <= k)`; `k` beyond the horizon is clamped to it.
    pub fn cdf(&self, k: usize) -> f64 {
        self.pmf[..=k.min(self.horizon())].iter().sum()
    }

    /// `sum_k P(T = k) beta^k` over the recorded horizon.
    pub fn truncated_transform(&self, beta: f64) -> f64 {
        let mut acc = 0.0;
        let mut power = 1.0;
        for &p in &self.pmf {
            acc += p * power;
            power *= beta;
        }
        acc
    }

    pub fn with_transform_samples(mut self, graph: &WeightedGraph, betas: &[f64]) -> Result<Self> {
        self.transform_samples = betas
            .iter()
            .map(|&b| survival_transform(graph, b).map(|s| (b, s)))
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

/// Maximum horizon for the truncated law.
pub const HORIZON_CAP: usize = 10_000_000;

/// `max(16 E T, 4 |V|^2)`, capped at [`HORIZON_CAP`].
pub fn default_horizon(graph: &WeightedGraph) -> Result<usize> {
    let et = expected_hitting_time(graph)?;
    let n = graph.num_vertices() as f64;
    let h = if et.is_finite() {
        (16.0 * et).max(4.0 * n * n)
    } else {
        4.0 * n * n
    };
    Ok((h.ceil() as usize).min(HORIZON_CAP))
}

/// Exact `P(T = k)` for `k <= horizon` by pushing the point mass at the
/// origin through the killed kernel.
pub fn hitting_time_pmf(graph: &WeightedGraph, horizon: usize) -> Result<HittingStats> {
    let expected_t = expected_hitting_time(graph)?;
    let kz = killed_kernel(graph)?;
    let acc = graph.accessible();
    let states: Vec<usize> = (0..graph.num_vertices()).filter(|&x| acc[x]).collect();
    let mut position = vec![usize::MAX; graph.num_vertices()];
    for (k, &x) in states.iter().enumerate() {
        position[x] = k;
    }
    // (state, next state or MAX for the target set, probability)
    let mut moves: Vec<Vec<(usize, f64)>> = vec![Vec::new(); states.len()];
    let mut into_target = vec![0.0; states.len()];
    for (k, &x) in states.iter().enumerate() {
        for &(y, p) in kz.row(x) {
            if graph.is_target(y) {
                into_target[k] += p;
            } else {
                moves[k].push((position[y], p));
            }
        }
    }

    let mut pmf = vec![0.0; horizon + 1];
    let mut mass = vec![0.0; states.len()];
    mass[position[graph.origin()]] = 1.0;
    let mut next = vec![0.0; states.len()];
    for slot in pmf.iter_mut().skip(1) {
        next.iter_mut().for_each(|v| *v = 0.0);
        let mut hit = 0.0;
        for (k, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            hit += m * into_target[k];
            for &(j, p) in &moves[k] {
                next[j] += m * p;
            }
        }
        *slot = hit;
        std::mem::swap(&mut mass, &mut next);
    }
    Ok(HittingStats {
        expected_t,
        pmf,
        survival_mass: mass.iter().sum(),
        transform_samples: Vec::new(),
    })
}
