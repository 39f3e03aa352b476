//! Named graph families and a seeded random corpus.
//!
//! Infinite families are truncated. Each generated graph records in its
//! metadata a safe horizon: a number of steps within which a walk from the
//! origin cannot feel the truncation (or, for the biased line, can feel it
//! only with the recorded probability).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphMetadata, WeightedGraph};

/// Default cap on generated vertex counts.
pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

/// Declarative description of a generated graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    UnitPath {
        n: usize,
    },
    BiasedLine {
        n: usize,
        g: f64,
        /// Reflecting segment kept behind the origin.
        #[serde(default)]
        tail: usize,
    },
    FastPath {
        n: usize,
        g: f64,
    },
    /// Fast path with `g` from [`polyg_g`].
    PolyFastPath {
        n: usize,
        p: f64,
    },
    RecurrentTreeLine {
        arity: usize,
        depths: Vec<u32>,
        length: usize,
        #[serde(default = "default_max_vertices")]
        max_vertices: usize,
    },
    ConcatenatedFast {
        cuts: Vec<usize>,
        p: f64,
    },
    Random(RandomSpec),
}

fn default_max_vertices() -> usize {
    DEFAULT_MAX_VERTICES
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<WeightedGraph> {
        let graph = match *self {
            Self::UnitPath { n } => unit_path(n),
            Self::BiasedLine { n, g, tail } => biased_line_with_tail(n, g, tail),
            Self::FastPath { n, g } => fast_path(n, g),
            Self::PolyFastPath { n, p } => fast_path(n, polyg_g(n as f64, p)?),
            Self::RecurrentTreeLine {
                arity,
                ref depths,
                length,
                max_vertices,
            } => recurrent_tree_line(arity, depths, length, max_vertices),
            Self::ConcatenatedFast { ref cuts, p } => concatenated_fast(cuts, p),
            Self::Random(ref spec) => random_graph(spec),
        }?;
        let mut meta = graph.metadata().cloned().unwrap_or_default();
        if let Ok(serde_json::Value::Object(fields)) = serde_json::to_value(self) {
            for (k, v) in fields {
                if k == "kind" {
                    if let serde_json::Value::String(kind) = v {
                        meta.generator = kind;
                    }
                } else {
                    meta.parameters.insert(k, v);
                }
            }
        }
        Ok(graph.with_metadata(meta))
    }
}

/// A path graph over `0..=weights.len()` with origin 0 and the far end as
/// the target.
fn path_from_weights(
    weights: impl IntoIterator<Item = f64>,
    first_label: i64,
    metadata: GraphMetadata,
) -> Result<WeightedGraph> {
    let edges: Vec<(usize, usize, f64)> = weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| (i, i + 1, w))
        .collect();
    if let Some(&(i, _, w)) = edges.iter().find(|e| !(e.2.is_finite() && e.2 > 0.0)) {
        return Err(Error::Generator(format!(
            "edge {i} would carry weight {w}; parameters out of floating-point range"
        )));
    }
    let count = edges.len() + 1;
    let labels = (0..count as i64)
        .map(|i| (first_label + i).to_string())
        .collect();
    let origin = (-first_label) as usize;
    WeightedGraph::from_parts(labels, edges, origin, vec![count - 1], Some(metadata))
}

/// Path `0 - 1 - ... - n` with unit weights.
pub fn unit_path(n: usize) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(Error::Generator("unit path needs n >= 1".into()));
    }
    let meta = GraphMetadata::new("unit_path").param("n", n);
    path_from_weights(std::iter::repeat_n(1.0, n), 0, meta)
}

/// Path `0 - ... - n` with weight `g^(i-1)` on the `i`-th edge.
pub fn biased_line(n: usize, g: f64) -> Result<WeightedGraph> {
    biased_line_with_tail(n, g, 0)
}

/// Biased line extended by `tail` edges behind the origin, with the same
/// geometric weights; the far end of the tail reflects.
pub fn biased_line_with_tail(n: usize, g: f64, tail: usize) -> Result<WeightedGraph> {
    if n < 1 {
        return Err(Error::Generator("biased line needs n >= 1".into()));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::Generator(format!(
            "biased line needs g > 0, got {g}"
        )));
    }
    let mut meta = GraphMetadata::new("biased_line")
        .param("n", n)
        .param("g", g)
        .param("tail", tail);
    if tail > 0 && g > 1.0 {
        // A walk with drift away from the tail ever reaches its end with
        // probability at most g^-tail.
        meta = meta.note(format!(
            "probability of ever reaching the reflecting end is at most {:e}",
            g.powf(-(tail as f64))
        ));
    } else if tail > 0 {
        meta.safe_horizon = Some(tail as u64);
    }
    let ln_g = g.ln();
    let weights = (0..n + tail).map(|k| ((k as f64 - tail as f64) * ln_g).exp());
    path_from_weights(weights, -(tail as i64), meta)
}

/// Tail length making the escape bound of [`biased_line_with_tail`] at most
/// `eps`.
pub fn safe_tail(g: f64, eps: f64) -> usize {
    ((1.0 / eps).ln() / g.ln()).ceil() as usize + 1
}

/// The fast path graph of length `n >= 4`: weights `1`, then
/// `(g - 1) g^(i-2)` for `2 <= i <= n - 1`, then `(g - 1)^2 g^(n-3)`.
pub fn fast_path(n: usize, g: f64) -> Result<WeightedGraph> {
    let meta = GraphMetadata::new("fast_path").param("n", n).param("g", g);
    path_from_weights(fast_path_weights(n, g)?, 0, meta)
}

fn fast_path_weights(n: usize, g: f64) -> Result<Vec<f64>> {
    if n < 4 {
        return Err(Error::Generator(format!("fast path needs n >= 4, got {n}")));
    }
    if !(g > 1.0 && g.is_finite()) {
        return Err(Error::Generator(format!("fast path needs g > 1, got {g}")));
    }
    let (gm1, ln_g) = (g - 1.0, g.ln());
    Ok((1..=n)
        .map(|i| match i {
            1 => 1.0,
            i if i == n => gm1 * gm1 * ((n as f64 - 3.0) * ln_g).exp(),
            i => gm1 * ((i as f64 - 2.0) * ln_g).exp(),
        })
        .collect())
}

/// `E T` on [`fast_path`]: `2(n - 2)/(g - 1) + 2g/(g - 1)^2 + n`.
pub fn fast_path_expected_time(n: usize, g: f64) -> f64 {
    let (n, gm1) = (n as f64, g - 1.0);
    2.0 * (n - 2.0) / gm1 + 2.0 * g / (gm1 * gm1) + n
}

/// `w_z / w_o = (g - 1)^2 g^(n-3)` on [`fast_path`].
pub fn fast_path_ratio(n: usize, g: f64) -> f64 {
    (g - 1.0).powi(2) * ((n as f64 - 3.0) * g.ln()).exp()
}

/// `g = (n^(p+2) / log(n^(p+2))^2)^(1/n)`, so that the fast path of length
/// `n` has `w_z / w_o ~ n^p`.
pub fn polyg_g(n: f64, p: f64) -> Result<f64> {
    let log_power = (p + 2.0) * n.ln();
    if !(log_power > 1.0) || !(p >= 0.0) {
        return Err(Error::Generator(format!(
            "polynomial odds need p >= 0 and log n^(p+2) > 1, got n = {n}, p = {p}"
        )));
    }
    Ok(((log_power - 2.0 * log_power.ln()) / n).exp())
}

/// Nonnegative integers `0..=length` with a complete `arity`-ary tree of
/// depth `depths[i]` hanging from vertex `i`.
///
/// The target is the sphere of radius `length` around 0, so trees are cut
/// at that radius; no walk from 0 can reach the cut in fewer than `length`
/// steps.
pub fn recurrent_tree_line(
    arity: usize,
    depths: &[u32],
    length: usize,
    max_vertices: usize,
) -> Result<WeightedGraph> {
    if arity < 2 {
        return Err(Error::Generator(format!(
            "tree arity must be >= 2, got {arity}"
        )));
    }
    if length < 1 {
        return Err(Error::Generator("line length must be >= 1".into()));
    }
    let depth_at = |i: usize| -> usize {
        let d = depths.get(i).copied().unwrap_or(0) as usize;
        d.min(length - i)
    };
    let mut needed = length + 1;
    for i in 0..=length {
        let mut level = 1usize;
        for _ in 0..depth_at(i) {
            level = level.saturating_mul(arity);
            needed = needed.saturating_add(level);
        }
    }
    if needed > max_vertices {
        return Err(Error::ResourceCap {
            needed,
            cap: max_vertices,
            flag: "--max-vertices",
        });
    }

    let mut labels: Vec<String> = (0..=length).map(|i| i.to_string()).collect();
    let mut edges = Vec::with_capacity(needed);
    let mut targets = vec![length];
    for i in 0..length {
        edges.push((i, i + 1, 1.0));
    }
    for i in 0..=length {
        let depth = depth_at(i);
        let mut frontier = vec![i];
        let mut counter = 0usize;
        for level in 1..=depth {
            let mut next = Vec::with_capacity(frontier.len() * arity);
            for &parent in &frontier {
                for _ in 0..arity {
                    counter += 1;
                    let v = labels.len();
                    labels.push(format!("{i}:{counter}"));
                    edges.push((parent, v, 1.0));
                    if i + level == length {
                        targets.push(v);
                    }
                    next.push(v);
                }
            }
            frontier = next;
        }
    }
    let mut meta = GraphMetadata::new("recurrent_tree_line")
        .param("arity", arity)
        .param("depths", depths)
        .param("length", length);
    meta.safe_horizon = Some(length as u64);
    WeightedGraph::from_parts(labels, edges, 0, targets, Some(meta))
}

/// `x_1 = start`, `x_i = x_{i-1}^2`.
pub fn default_cut_points(start: usize, count: usize) -> Vec<usize> {
    let mut cuts = Vec::with_capacity(count);
    let mut x = start;
    for _ in 0..count {
        cuts.push(x);
        x = x.saturating_mul(x);
    }
    cuts
}

/// Fast paths of lengths `x_i - x_{i-1}` and growth power `p`, joined end to
/// start. Each block is scaled by the total edge weight of the blocks before
/// it, so that the walk rarely returns into a finished block. The target is
/// the last cut point.
pub fn concatenated_fast(cuts: &[usize], p: f64) -> Result<WeightedGraph> {
    if cuts.is_empty() {
        return Err(Error::Generator("at least one cut point is needed".into()));
    }
    let mut weights = Vec::with_capacity(*cuts.last().unwrap());
    let mut prev = 0usize;
    let mut accumulated = 0.0f64;
    for &x in cuts {
        let n = x
            .checked_sub(prev)
            .filter(|&n| n >= 4)
            .ok_or_else(|| Error::Generator(format!("block {prev}..{x} is shorter than 4")))?;
        let scale = if accumulated == 0.0 { 1.0 } else { accumulated };
        let block = fast_path_weights(n, polyg_g(n as f64, p)?)?;
        weights.extend(block.iter().map(|w| w * scale));
        accumulated += block.iter().sum::<f64>() * scale;
        prev = x;
    }
    let mut meta = GraphMetadata::new("concatenated_fast")
        .param("cuts", cuts)
        .param("p", p);
    meta.safe_horizon = Some(prev as u64);
    path_from_weights(weights, 0, meta)
}

/// Cut points at which the concatenated path is evaluated, with `E T` to
/// each of them and the share of it due to the last block's own closed form.
pub fn concatenated_block_shares(cuts: &[usize], p: f64) -> Result<Vec<(usize, f64, f64)>> {
    let graph = concatenated_fast(cuts, p)?;
    let mut out = Vec::with_capacity(cuts.len());
    let mut prev = 0;
    for &x in cuts {
        let prefix = graph.with_endpoints("0", &[&x.to_string()])?;
        let et = crate::exact::expected_hitting_time(&prefix.restrict_accessible())?;
        let n = x - prev;
        let last = fast_path_expected_time(n, polyg_g(n as f64, p)?);
        out.push((x, et, last / et));
        prev = x;
    }
    Ok(out)
}

/// Parameters of [`random_graph`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    pub max_vertices: usize,
    pub weight_min: f64,
    pub weight_max: f64,
    pub min_distance: usize,
    /// Largest number of target vertices.
    #[serde(default = "one")]
    pub max_targets: usize,
}

fn one() -> usize {
    1
}

impl RandomSpec {
    /// The property-test corpus: up to 12 vertices, weights in `[0.1, 10]`,
    /// `dist(o, z) >= 3`, one or two targets.
    pub fn corpus(seed: u64) -> Self {
        Self {
            seed,
            max_vertices: 12,
            weight_min: 0.1,
            weight_max: 10.0,
            min_distance: 3,
            max_targets: 2,
        }
    }
}

const RANDOM_RETRIES: usize = 1000;

/// Connected random graph: a random recursive tree plus a few extra edges
/// and self-loops, with the origin and targets at distance at least
/// `min_distance`. Deterministic in the seed.
pub fn random_graph(spec: &RandomSpec) -> Result<WeightedGraph> {
    let RandomSpec {
        seed,
        max_vertices,
        weight_min,
        weight_max,
        min_distance,
        max_targets,
    } = *spec;
    if max_vertices < min_distance + 1 || max_vertices < 2 {
        return Err(Error::Generator(format!(
            "{max_vertices} vertices cannot realize distance {min_distance}"
        )));
    }
    if !(weight_min > 0.0 && weight_min <= weight_max && weight_max.is_finite()) {
        return Err(Error::Generator(format!(
            "bad weight range [{weight_min}, {weight_max}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| rng.random_range(weight_min..=weight_max);
    for _ in 0..RANDOM_RETRIES {
        let n = rng.random_range(min_distance.max(1) + 1..=max_vertices);
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut present = std::collections::HashSet::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            edges.push((u, v, weight(&mut rng)));
            present.insert((u, v));
        }
        for _ in 0..rng.random_range(0..=n / 3) {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            let key = (a.min(b), a.max(b));
            if present.insert(key) {
                edges.push((key.0, key.1, weight(&mut rng)));
            }
        }
        let mut scratch = WeightedGraph::from_parts(
            (0..n).map(|i| i.to_string()).collect(),
            edges.clone(),
            0,
            vec![n - 1],
            None,
        )?;
        let origin = rng.random_range(0..n);
        let dist = scratch.distances_from(origin);
        let mut far: Vec<usize> = (0..n)
            .filter(|&v| dist[v].is_some_and(|d| d >= min_distance))
            .collect();
        if far.is_empty() {
            continue;
        }
        far.shuffle(&mut rng);
        let count = rng.random_range(1..=max_targets.max(1).min(far.len()));
        let mut targets = far[..count].to_vec();
        targets.sort_unstable();
        let meta = GraphMetadata::new("random")
            .param("seed", seed)
            .param("max_vertices", max_vertices)
            .param("weight_min", weight_min)
            .param("weight_max", weight_max)
            .param("min_distance", min_distance)
            .param("max_targets", max_targets);
        scratch = WeightedGraph::from_parts(
            (0..n).map(|i| i.to_string()).collect(),
            edges,
            origin,
            targets,
            Some(meta),
        )?;
        let graph = scratch.restrict_accessible();
        if graph
            .origin_target_distance()
            .is_some_and(|d| d >= min_distance)
        {
            return Ok(graph);
        }
    }
    Err(Error::Generator(format!(
        "no graph with distance {min_distance} after {RANDOM_RETRIES} attempts"
    )))
}

/// `count` corpus graphs with seeds `base, base + 1, ...`.
pub fn corpus(base: u64, count: usize) -> Result<Vec<WeightedGraph>> {
    (0..count as u64)
        .map(|i| random_graph(&RandomSpec::corpus(base + i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{expected_hitting_time, survival_transform, transition_kernel};
    use crate::graph::{parse, serialize};
    use crate::reference::{mean_m, step_transform};

    fn round_trips(g: &WeightedGraph) {
        let text = serialize(g);
        let back = parse(text.as_bytes()).unwrap();
        assert_eq!(serialize(&back), text);
        assert_eq!(&back.restrict_accessible(), g);
    }

    #[test]
    fn unit_path_facts() {
        let g = unit_path(7).unwrap();
        assert!((expected_hitting_time(&g).unwrap() - 49.0).abs() < 1e-9);
        assert_eq!(g.weight_ratio(), 1.0);
        assert!(unit_path(0).is_err());
        round_trips(&g);
    }

    #[test]
    fn biased_line_facts() {
        let g = biased_line(6, 3.0).unwrap();
        let k = transition_kernel(&g).unwrap();
        assert!((k.get(2, 3) / k.get(2, 1) - 3.0).abs() < 1e-12);
        assert!((g.weight_ratio() - 3f64.powi(5)).abs() < 1e-9);
        assert!(biased_line(3, 0.0).is_err());
        round_trips(&g);
    }

    #[test]
    fn biased_line_mean_with_long_tail() {
        let (n, g) = (10, 2.0);
        let target = n as f64 * mean_m(g);
        let mut prev_gap = f64::INFINITY;
        for tail in [2, 8, 40] {
            let line = biased_line_with_tail(n, g, tail).unwrap();
            let gap = (expected_hitting_time(&line).unwrap() - target).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-8);
    }

    #[test]
    fn biased_line_transform_matches_the_reference_walk() {
        for (n, g, beta) in [
            (1usize, 2.0, 0.5),
            (5, 1.5, 0.9),
            (12, 3.0, 0.3),
            (30, 2.5, 0.99),
        ] {
            let tail = safe_tail(g, 1e-13);
            let line = biased_line_with_tail(n, g, tail).unwrap();
            let phi = step_transform(g, beta).unwrap();
            let s = survival_transform(&line, beta).unwrap();
            assert!((s - phi.powi(n as i32)).abs() < 1e-10, "n = {n}, g = {g}");

            // a lead-in edge of negligible weight adds one step: beta phi^n
            let mut file = line.to_file();
            file.vertices.push("o".into());
            file.edges.push(("o".into(), "0".into(), 1e-14));
            file.origin = "o".into();
            let led = WeightedGraph::from_file(file).unwrap();
            let s = survival_transform(&led, beta).unwrap();
            assert!((s - beta * phi.powi(n as i32)).abs() < 1e-10);
        }
    }

    #[test]
    fn fast_path_facts() {
        let (n, g) = (5, 2.0);
        let fp = fast_path(n, g).unwrap();
        assert_eq!(fp.vertex_weight("0").unwrap(), 1.0);
        assert_eq!(fp.target_weight(), 4.0);
        assert!((fp.weight_ratio() - fast_path_ratio(n, g)).abs() < 1e-12);
        for (n, g) in [(4, 3.0), (20, 1.5), (60, 1.1)] {
            let et = expected_hitting_time(&fast_path(n, g).unwrap()).unwrap();
            let closed = fast_path_expected_time(n, g);
            assert!((et - closed).abs() < 1e-9 * closed);
        }
        assert!(fast_path(3, 2.0).is_err());
        assert!(fast_path(5, 1.0).is_err());
        round_trips(&fp);
    }

    #[test]
    fn polynomial_odds() {
        let g = polyg_g(1000.0, 0.0).unwrap();
        let l = 2.0 * 1000f64.ln();
        let approx = (l - 2.0 * l.ln()) / 1000.0;
        assert!((g.ln() - approx).abs() < 1e-15);
        // g - 1 ~ log g only to first order
        assert!(((g - 1.0) - approx).abs() < 5e-3 * approx);
        let mut prev = 0.0;
        for k in 3..=7 {
            let n = 10f64.powi(k);
            let v = n * (polyg_g(n, 0.0).unwrap() - 1.0) / (2.0 * n.ln());
            assert!(v > prev && v < 1.0);
            prev = v;
        }
        assert!(polyg_g(1.0, 0.0).is_err());
    }

    #[test]
    fn tree_line_counts() {
        let plain = recurrent_tree_line(2, &[], 6, 100).unwrap();
        assert_eq!(plain.num_vertices(), 7);
        assert_eq!(plain.num_edges(), 6);
        let g = recurrent_tree_line(2, &[1, 1], 6, 100).unwrap();
        assert_eq!(g.num_vertices(), 7 + 2 + 2);
        let g = recurrent_tree_line(3, &[0, 2, 3], 10, 1000).unwrap();
        assert_eq!(g.num_vertices(), 11 + (3 + 9) + (3 + 9 + 27));
        // targets: the line end plus tree leaves at distance 10 (none here)
        assert_eq!(g.targets().len(), 1);
        let cut = recurrent_tree_line(2, &[0, 0, 0, 5], 5, 1000).unwrap();
        // the tree at 3 is cut at depth 2; its 4 leaves join the targets
        assert_eq!(cut.num_vertices(), 6 + 2 + 4);
        assert_eq!(cut.targets().len(), 5);
        assert_eq!(cut.restrict_accessible(), cut);
        assert!(matches!(
            recurrent_tree_line(2, &[30], 40, 1000),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn concatenation() {
        let single = concatenated_fast(&[20], 1.0).unwrap();
        let fp = fast_path(20, polyg_g(20.0, 1.0).unwrap()).unwrap();
        assert_eq!(single.to_file().edges, fp.to_file().edges);
        assert!(concatenated_fast(&[10, 12], 0.0).is_err());
        let cuts = default_cut_points(16, 3);
        assert_eq!(cuts, vec![16, 256, 65536]);
    }

    #[test]
    fn concatenation_last_block_dominates() {
        let shares = concatenated_block_shares(&[16, 256, 4096], 0.0).unwrap();
        assert!((shares[0].2 - 1.0).abs() < 1e-9);
        assert!(shares.iter().all(|&(_, _, r)| r > 0.0 && r <= 1.0 + 1e-9));
    }

    #[test]
    fn random_graphs() {
        let a = random_graph(&RandomSpec::corpus(5)).unwrap();
        let b = random_graph(&RandomSpec::corpus(5)).unwrap();
        assert_eq!(serialize(&a), serialize(&b));
        let graphs = corpus(100, 60).unwrap();
        let mut distances = std::collections::BTreeSet::new();
        for g in &graphs {
            assert!(g.num_vertices() <= 12);
            let d = g.origin_target_distance().unwrap();
            assert!(d >= 3);
            distances.insert(d);
            round_trips(g);
        }
        assert!(distances.len() >= 3);
        assert!(graphs.iter().any(|g| g.targets().len() == 2));
    }

    #[test]
    fn spec_builds_carry_metadata() {
        let spec = GeneratorSpec::FastPath { n: 6, g: 2.0 };
        let g = spec.build().unwrap();
        let meta = g.metadata().unwrap();
        assert_eq!(meta.generator, "fast_path");
        assert_eq!(meta.parameters["n"], 6);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), spec);
        assert!(GeneratorSpec::FastPath { n: 3, g: 2.0 }.build().is_err());
    }
}
