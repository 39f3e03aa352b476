//! Loss flows of the lossy walk and their decomposition into path flows.
//!
//! For `0 < beta < 1` the loss flow `f(x, y) = G_beta(o, x) beta K_z(x, y)`
//! is the expected number of `x -> y` steps taken by the walk that dies with
//! probability `1 - beta` before every step and stops on entering `z`. It
//! obeys a node law with loss factor `beta` and is reversible around cycles.
//! [`decompose`] writes it as a convex combination of flows each supported
//! on one simple `o -> z` path, plus one flow that never reaches `z`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{self, WalkParameters};
use crate::graph::WeightedGraph;

/// Relative slack for the admissibility test `f(y, x) < beta f(x, y)`.
const STRICTNESS: f64 = 1e-12;
/// Entries below this fraction of the largest entry count as zero while
/// peeling.
const DUST: f64 = 1e-13;

/// Flow on ordered vertex pairs with a single origin and a single target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossFlow {
    beta: f64,
    origin: usize,
    target: usize,
    /// Positive entries `(y, f(x, y))` per `x`, sorted by `y`.
    out: Vec<Vec<(usize, f64)>>,
}

impl LossFlow {
    /// Flow from explicit entries; zero entries are dropped and repeated
    /// pairs summed.
    pub fn from_entries(
        beta: f64,
        num_vertices: usize,
        origin: usize,
        target: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut out = vec![Vec::new(); num_vertices];
        for (x, y, v) in entries {
            if v != 0.0 {
                out[x].push((y, v));
            }
        }
        for row in &mut out {
            row.sort_by_key(|&(y, _)| y);
            row.dedup_by(|next, kept| {
                if next.0 == kept.0 {
                    kept.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }
        Self {
            beta,
            origin,
            target,
            out,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    /// Positive entries leaving `x`.
    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.out[x]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        let row = &self.out[x];
        row.binary_search_by_key(&y, |&(v, _)| v)
            .map_or(0.0, |k| row[k].1)
    }

    /// Sets one entry; used to build perturbed flows.
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        let row = &mut self.out[x];
        match row.binary_search_by_key(&y, |&(v, _)| v) {
            Ok(k) if value == 0.0 => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = value,
            Err(k) if value != 0.0 => row.insert(k, (y, value)),
            Err(_) => {}
        }
    }

    /// All positive entries as `(x, y, f(x, y))`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |&(y, v)| (x, y, v)))
    }

    /// `f(x, V)`.
    pub fn out_flow(&self, x: usize) -> f64 {
        self.out[x].iter().map(|&(_, v)| v).sum()
    }

    /// `f(V, x)` for every `x`.
    pub fn in_flows(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.num_vertices()];
        for (_, y, v) in self.entries() {
            acc[y] += v;
        }
        acc
    }

    fn scaled(&self, factor: f64) -> Self {
        let mut copy = self.clone();
        for row in &mut copy.out {
            for entry in row.iter_mut() {
                entry.1 *= factor;
            }
        }
        copy
    }

    fn max_entry(&self) -> f64 {
        self.entries().map(|(_, _, v)| v).fold(0.0, f64::max)
    }
}

/// The loss flow of the walk on `graph` with loss factor `beta < 1`.
pub fn build_flow(graph: &WeightedGraph, beta: f64) -> Result<LossFlow> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!(
            "loss flows need 0 < beta < 1, got {beta}; use the exact engine at beta = 1"
        ));
    }
    let &[target] = graph.targets() else {
        return Err(Error::NotContracted {
            targets: graph.targets().len(),
        });
    };
    let row = exact::green_row(graph, beta)?;
    let entries = (0..graph.num_vertices())
        .filter(|&x| x != target && row[x] != 0.0)
        .flat_map(|x| {
            let scale = row[x] * beta / graph.weight_of(x);
            graph
                .neighbors(x)
                .iter()
                .map(move |&(y, w)| (x, y, scale * w))
        });
    Ok(LossFlow::from_entries(
        beta,
        graph.num_vertices(),
        graph.origin(),
        target,
        entries,
    ))
}

fn node_law_residuals(flow: &LossFlow, source: f64) -> Vec<f64> {
    let inflow = flow.in_flows();
    (0..flow.num_vertices())
        .map(|x| {
            let lhs = if x == flow.target {
                0.0
            } else {
                let src = if x == flow.origin { source } else { 0.0 };
                flow.beta * (inflow[x] + src)
            };
            (lhs - flow.out_flow(x)).abs()
        })
        .collect()
}

/// `max_x |beta (f(V, x) + 1(x = o)) 1(x != z) - f(x, V)|`.
pub fn verify_node_law(flow: &LossFlow) -> f64 {
    node_law_residuals(flow, 1.0)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Product of `f` along a closed walk `cycle[0], ..., cycle[k-1], cycle[0]`,
/// as a logarithm.
fn log_cycle_product(flow: &LossFlow, cycle: &[usize]) -> f64 {
    let k = cycle.len();
    (0..k)
        .map(|i| flow.get(cycle[i], cycle[(i + 1) % k]).ln())
        .sum()
}

/// Largest relative gap between `f(pi)` and `f(pi')` over the given cycles,
/// `pi'` being `pi` traversed backwards.
pub fn verify_reversibility(flow: &LossFlow, cycles: &[Vec<usize>]) -> f64 {
    cycles
        .iter()
        .map(|cycle| {
            let reversed: Vec<usize> = cycle.iter().rev().copied().collect();
            let a = log_cycle_product(flow, cycle);
            let b = log_cycle_product(flow, &reversed);
            match (a.is_finite(), b.is_finite()) {
                (true, true) => -(-(a - b).abs()).exp_m1(),
                (false, false) => 0.0,
                _ => 1.0,
            }
        })
        .fold(0.0, f64::max)
}

/// Up to `count` simple cycles in the bidirectional support of `flow`,
/// found by random walks from random start vertices.
pub fn sample_cycles(flow: &LossFlow, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let n = flow.num_vertices();
    let both: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            flow.row(x)
                .iter()
                .filter(|&&(y, _)| y != x && flow.get(y, x) > 0.0)
                .map(|&(y, _)| y)
                .collect()
        })
        .collect();
    let starts: Vec<usize> = (0..n).filter(|&x| !both[x].is_empty()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cycles = Vec::new();
    if starts.is_empty() {
        return cycles;
    }
    for _ in 0..count * 4 {
        if cycles.len() == count {
            break;
        }
        let mut walk = vec![starts[rng.random_range(0..starts.len())]];
        let mut seen = vec![usize::MAX; n];
        seen[walk[0]] = 0;
        for _ in 0..4 * n {
            let x = *walk.last().unwrap();
            let prev = (walk.len() >= 2).then(|| walk[walk.len() - 2]);
            let choices: Vec<usize> = both[x]
                .iter()
                .copied()
                .filter(|&y| Some(y) != prev)
                .collect();
            if choices.is_empty() {
                break;
            }
            let y = choices[rng.random_range(0..choices.len())];
            if seen[y] != usize::MAX {
                let cycle = walk[seen[y]..].to_vec();
                if cycle.len() >= 3 {
                    cycles.push(cycle);
                }
                break;
            }
            seen[y] = walk.len();
            walk.push(y);
        }
    }
    cycles
}

/// `theta(x, y) = f(x, y) / f(y, x)`.
pub fn theta(flow: &LossFlow, x: usize, y: usize) -> Result<f64> {
    let back = flow.get(y, x);
    if back == 0.0 {
        return domain(format!("theta({x}, {y}) needs f({y}, {x}) > 0"));
    }
    Ok(flow.get(x, y) / back)
}

/// `s(x, y) = (beta f(x, y) - f(y, x)) / (f(x, y) - beta f(y, x))`.
pub fn s_value(flow: &LossFlow, x: usize, y: usize) -> Result<f64> {
    let (fwd, back) = (flow.get(x, y), flow.get(y, x));
    let den = fwd - flow.beta * back;
    if den == 0.0 {
        return domain(format!("s({x}, {y}) has a zero denominator"));
    }
    Ok((flow.beta * fwd - back) / den)
}

/// `h(s) = s (1 - s beta) / (beta - s)` on `0 <= s < beta`.
pub fn h(s: f64, beta: f64) -> Result<f64> {
    if !(0.0..beta).contains(&s) {
        return domain(format!("h needs 0 <= s < beta = {beta}, got s = {s}"));
    }
    Ok(s * (1.0 - s * beta) / (beta - s))
}

/// `S`, `R` and `Gamma` read off a flow.
///
/// `Gamma = sum_x theta(pi_x) f(x, z) / beta`, where `pi_x` is a shortest
/// path from `o` to `x` along pairs carrying flow both ways, and
/// `theta(pi)` is the product of `theta` over its steps.
pub fn flow_parameters(flow: &LossFlow) -> Result<WalkParameters> {
    let (o, z) = (flow.origin, flow.target);
    let s = (0..flow.num_vertices()).map(|x| flow.get(x, z)).sum();
    let r = 1.0
        + (0..flow.num_vertices())
            .map(|x| flow.get(x, o))
            .sum::<f64>();

    // log theta(pi_x) by breadth-first search away from z
    let n = flow.num_vertices();
    let mut log_theta = vec![f64::NAN; n];
    log_theta[o] = 0.0;
    let mut queue = VecDeque::from([o]);
    while let Some(x) = queue.pop_front() {
        for &(y, fwd) in flow.row(x) {
            if y == z || !log_theta[y].is_nan() {
                continue;
            }
            let back = flow.get(y, x);
            if back > 0.0 {
                log_theta[y] = log_theta[x] + (fwd / back).ln();
                queue.push_back(y);
            }
        }
    }
    let mut gamma = 0.0;
    for x in 0..n {
        let into_z = flow.get(x, z);
        if into_z == 0.0 {
            continue;
        }
        if log_theta[x].is_nan() {
            return domain(format!(
                "no two-way flow path from the origin to vertex {x}"
            ));
        }
        gamma += log_theta[x].exp() * into_z / flow.beta;
    }
    Ok(WalkParameters {
        beta: flow.beta,
        s,
        r,
        gamma,
    })
}

/// The unique loss flow supported on `path` (origin first, target last)
/// whose backward/forward ratio on step `i` is `thetas[i - 1]`:
/// `f(x_{i-1}, x_i) = prod_{j <= i} (beta - theta_{j-1}) / (1 - beta theta_j)`
/// with `theta_0 = 0`, and `f(x_i, x_{i-1}) = theta_i f(x_{i-1}, x_i)`.
pub fn path_flow(
    path: &[usize],
    thetas: &[f64],
    beta: f64,
    num_vertices: usize,
) -> Result<LossFlow> {
    if path.len() < 2 || thetas.len() != path.len() - 1 {
        return domain(format!(
            "path of {} vertices needs {} ratios, got {}",
            path.len(),
            path.len().saturating_sub(1),
            thetas.len()
        ));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("path flows need 0 < beta < 1, got {beta}"));
    }
    for (i, &t) in thetas.iter().enumerate() {
        if !(t >= 0.0 && t < beta) {
            return Err(Error::InfeasiblePath {
                index: i + 1,
                theta: t,
                beta,
            });
        }
    }
    let mut entries = Vec::with_capacity(2 * thetas.len());
    let mut forward = 1.0;
    let mut prev = 0.0;
    for (i, &t) in thetas.iter().enumerate() {
        forward *= (beta - prev) / (1.0 - beta * t);
        entries.push((path[i], path[i + 1], forward));
        entries.push((path[i + 1], path[i], t * forward));
        prev = t;
    }
    Ok(LossFlow::from_entries(
        beta,
        num_vertices,
        path[0],
        *path.last().unwrap(),
        entries,
    ))
}

/// One path flow of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub alpha: f64,
    /// Simple path from the origin to the target.
    pub path: Vec<usize>,
    pub flow: LossFlow,
}

impl Component {
    /// `s` on the steps of the path except the last (which is `beta`).
    pub fn s_values(&self) -> Vec<f64> {
        self.path
            .windows(2)
            .take(self.path.len() - 2)
            .map(|w| s_value(&self.flow, w[0], w[1]).expect("path flows have positive steps"))
            .collect()
    }
}

/// `f = sum_i alpha_i f_i + dead_end_alpha f_dead`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowDecomposition {
    pub beta: f64,
    pub components: Vec<Component>,
    pub dead_end_alpha: f64,
    /// Normalized to unit source; sends nothing into the target. Empty when
    /// `dead_end_alpha` is zero.
    pub dead_end: LossFlow,
}

impl FlowDecomposition {
    pub fn total_alpha(&self) -> f64 {
        self.components.iter().map(|c| c.alpha).sum::<f64>() + self.dead_end_alpha
    }

    pub fn reconstruct(&self) -> LossFlow {
        let d = &self.dead_end;
        let pieces = self
            .components
            .iter()
            .flat_map(|c| c.flow.entries().map(move |(x, y, v)| (x, y, c.alpha * v)))
            .chain(d.entries().map(|(x, y, v)| (x, y, self.dead_end_alpha * v)));
        LossFlow::from_entries(self.beta, d.num_vertices(), d.origin, d.target, pieces)
    }

    /// `||sum alpha_i f_i - f||_inf`.
    pub fn reconstruction_error(&self, flow: &LossFlow) -> f64 {
        let rebuilt = self.reconstruct();
        let a = rebuilt
            .entries()
            .map(|(x, y, v)| (v - flow.get(x, y)).abs());
        let b = flow
            .entries()
            .map(|(x, y, v)| (v - rebuilt.get(x, y)).abs());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Convex combination of the components' `S`, `R`, `Gamma`.
    pub fn combined_parameters(&self) -> Result<WalkParameters> {
        let mut acc = WalkParameters {
            beta: self.beta,
            s: 0.0,
            r: 0.0,
            gamma: 0.0,
        };
        let parts =
            self.components.iter().map(|c| (c.alpha, &c.flow)).chain(
                (self.dead_end_alpha > 0.0).then_some((self.dead_end_alpha, &self.dead_end)),
            );
        for (alpha, f) in parts {
            let p = flow_parameters(f)?;
            acc.s += alpha * p.s;
            acc.r += alpha * p.r;
            acc.gamma += alpha * p.gamma;
        }
        Ok(acc)
    }
}

/// Peels path flows off `flow` until no admissible `o -> z` path remains.
///
/// A step `x -> y` is admissible while the remainder carries flow on it and
/// `y = z` or `f(y, x) < beta f(x, y)`. Each round takes the shortest
/// admissible path (ties broken towards smaller vertex indices), builds its
/// path flow from the ratios of `flow`, and subtracts the largest multiple
/// that keeps the remainder nonnegative. What is left, renormalized, is the
/// dead-end flow.
pub fn decompose(flow: &LossFlow) -> Result<FlowDecomposition> {
    let (beta, o, z) = (flow.beta, flow.origin, flow.target);
    let n = flow.num_vertices();
    let dust = DUST * flow.max_entry();
    let mut rest = flow.clone();
    let mut source = 1.0;
    let mut components = Vec::new();
    let cap = flow.entries().count() + 1;

    while let Some(path) = admissible_path(flow, &rest, dust) {
        if components.len() == cap {
            return Err(Error::DecompositionStalled(cap));
        }
        let thetas: Vec<f64> = path
            .windows(2)
            .map(|w| flow.get(w[1], w[0]) / flow.get(w[0], w[1]))
            .collect();
        let pf = path_flow(&path, &thetas, beta, n)?;
        // largest alpha keeping the remainder nonnegative
        let (mut alpha, mut argmin) = (f64::INFINITY, (o, z));
        for (x, y, v) in pf.entries() {
            let ratio = rest.get(x, y) / v;
            if ratio < alpha {
                alpha = ratio;
                argmin = (x, y);
            }
        }
        for (x, y, v) in pf.entries() {
            let left = rest.get(x, y) - alpha * v;
            rest.set(x, y, if left > dust { left } else { 0.0 });
        }
        rest.set(argmin.0, argmin.1, 0.0);
        source -= alpha;
        components.push(Component {
            alpha,
            path,
            flow: pf,
        });
    }

    let dead_end_alpha = source.max(0.0);
    let dead_end = if dead_end_alpha > 0.0 {
        rest.scaled(1.0 / dead_end_alpha)
    } else {
        LossFlow::from_entries(beta, n, o, z, [])
    };
    Ok(FlowDecomposition {
        beta,
        components,
        dead_end_alpha,
        dead_end,
    })
}

/// Shortest admissible path, smallest indices first among equals.
fn admissible_path(flow: &LossFlow, rest: &LossFlow, dust: f64) -> Option<Vec<usize>> {
    let (beta, o, z) = (flow.beta, flow.origin, flow.target);
    let n = flow.num_vertices();
    let admissible = |x: usize, y: usize, v: f64| {
        x != y
            && v > dust
            && (y == z || flow.get(y, x) < beta * flow.get(x, y) * (1.0 - STRICTNESS))
    };
    // reverse adjacency of admissible steps
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, y, v) in rest.entries() {
        if admissible(x, y, v) {
            into[y].push(x);
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[z] = 0;
    let mut queue = VecDeque::from([z]);
    while let Some(y) = queue.pop_front() {
        for &x in &into[y] {
            if dist[x] == usize::MAX {
                dist[x] = dist[y] + 1;
                queue.push_back(x);
            }
        }
    }
    if dist[o] == usize::MAX {
        return None;
    }
    let mut path = vec![o];
    let mut x = o;
    while x != z {
        x = rest
            .row(x)
            .iter()
            .find(|&&(y, v)| dist[y] == dist[x] - 1 && admissible(x, y, v))
            .map(|&(y, _)| y)?;
        path.push(x);
    }
    Some(path)
}

/// Coordinates of the array representation: per component, its weight and
/// the `s` values of all steps but the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrayRepresentation {
    pub beta: f64,
    pub alphas: Vec<f64>,
    pub s: Vec<Vec<f64>>,
}

impl ArrayRepresentation {
    /// `beta sum_pi alpha_pi prod_i s_pi,i`.
    pub fn survival(&self) -> f64 {
        self.beta
            * self
                .alphas
                .iter()
                .zip(&self.s)
                .map(|(a, s)| a * s.iter().product::<f64>())
                .sum::<f64>()
    }

    /// `sum_pi alpha_pi prod_i h(s_pi,i)`.
    pub fn gamma(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (a, s) in self.alphas.iter().zip(&self.s) {
            let mut prod = 1.0;
            for &si in s {
                prod *= h(si, self.beta)?;
            }
            acc += a * prod;
        }
        Ok(acc)
    }

    /// `2 / (1 - beta^2) (1 - beta sum_pi alpha_pi s_pi,1)`, an upper bound
    /// on `R`; a single-step path contributes `s = beta`.
    pub fn visits_bound(&self) -> f64 {
        let b = self.beta;
        let first: f64 = self
            .alphas
            .iter()
            .zip(&self.s)
            .map(|(a, s)| a * s.first().copied().unwrap_or(b))
            .sum();
        2.0 / (1.0 - b * b) * (1.0 - b * first)
    }
}

pub fn array_representation(decomposition: &FlowDecomposition) -> ArrayRepresentation {
    ArrayRepresentation {
        beta: decomposition.beta,
        alphas: decomposition.components.iter().map(|c| c.alpha).collect(),
        s: decomposition
            .components
            .iter()
            .map(Component::s_values)
            .collect(),
    }
}

/// `h((S / beta)^(1/n))^n`, the lower bound on `Gamma` behind the Laplace
/// domination, for `n >= 1`.
pub fn chain_bound(s: f64, beta: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return domain("chain bound needs n >= 1");
    }
    let base = ((s / beta).ln() / n as f64).exp();
    Ok(h(base, beta)?.powi(n as i32))
}
