//! Trajectory simulation.
//!
//! Every replication draws from its own stream of a counter-based ChaCha8
//! generator, keyed by `(seed, replication index)`, so results do not
//! depend on thread scheduling and any single replication can be replayed.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;

/// What a simulation run reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    HittingTime,
    /// `|X_k| / k`.
    SpeedRatio,
    /// `|X_k| / sqrt(k log k)`.
    SingleLogRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: u64,
    /// Walks still running after this many steps are censored.
    pub max_steps: u64,
    /// Steps at which `|X_k|` is recorded by [`escape_ratios`].
    pub record: Vec<u64>,
    pub estimator: Estimator,
}

impl SimConfig {
    pub fn hitting(seed: u64, replications: u64, max_steps: u64) -> Self {
        Self {
            seed,
            replications,
            max_steps,
            record: Vec::new(),
            estimator: Estimator::HittingTime,
        }
    }

    pub fn escape(seed: u64, replications: u64, record: Vec<u64>, estimator: Estimator) -> Self {
        let max_steps = record.iter().copied().max().unwrap_or(0);
        Self {
            seed,
            replications,
            max_steps,
            record,
            estimator,
        }
    }

    fn rng(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }
}

/// A walk that can be simulated.
pub trait Walker: Sync {
    type State: Copy;

    fn start(&self) -> Self::State;
    fn step<R: Rng>(&self, state: Self::State, rng: &mut R) -> Self::State;
    fn is_target(&self, state: Self::State) -> bool;
    /// Graph distance from the start.
    fn distance(&self, state: Self::State) -> u64;
    /// Steps within which truncation cannot be felt, if the walker is a
    /// truncation of an infinite object.
    fn safe_horizon(&self) -> Option<u64> {
        None
    }
}

/// Walk on a weighted graph, stepping by cumulative-weight inversion.
pub struct GraphWalker {
    origin: usize,
    is_target: Vec<bool>,
    distance: Vec<u64>,
    /// `(neighbor, cumulative weight)` per vertex.
    cumulative: Vec<Vec<(usize, f64)>>,
    safe_horizon: Option<u64>,
}

impl GraphWalker {
    pub fn new(graph: &WeightedGraph) -> Result<Self> {
        let n = graph.num_vertices();
        let cumulative = (0..n)
            .map(|x| {
                let mut acc = 0.0;
                graph
                    .neighbors(x)
                    .iter()
                    .map(|&(y, w)| {
                        acc += w;
                        (y, acc)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        if let Some(x) = (0..n).find(|&x| cumulative[x].is_empty()) {
            return Err(Error::ZeroVertexWeight(graph.label(x).to_string()));
        }
        let distance = graph
            .distances_from(graph.origin())
            .into_iter()
            .map(|d| d.map_or(u64::MAX, |d| d as u64))
            .collect();
        Ok(Self {
            origin: graph.origin(),
            is_target: (0..n).map(|x| graph.is_target(x)).collect(),
            distance,
            cumulative,
            safe_horizon: graph.metadata().and_then(|m| m.safe_horizon),
        })
    }
}

impl Walker for GraphWalker {
    type State = usize;

    fn start(&self) -> usize {
        self.origin
    }

    fn step<R: Rng>(&self, x: usize, rng: &mut R) -> usize {
        let row = &self.cumulative[x];
        let total = row[row.len() - 1].1;
        let u = rng.random::<f64>() * total;
        let k = row.partition_point(|&(_, c)| c <= u);
        row[k.min(row.len() - 1)].0
    }

    fn is_target(&self, x: usize) -> bool {
        self.is_target[x]
    }

    fn distance(&self, x: usize) -> u64 {
        self.distance[x]
    }

    fn safe_horizon(&self) -> Option<u64> {
        self.safe_horizon
    }
}

/// Biased walk on all of `Z` from 0, stepping right with odds `g : 1`;
/// the target is the point `target` if given.
pub struct IntegerWalker {
    right: f64,
    target: Option<i64>,
}

impl IntegerWalker {
    pub fn new(g: f64, target: Option<i64>) -> Result<Self> {
        let walk = crate::reference::BiasedWalk::new(g)?;
        Ok(Self {
            right: walk.right_probability(),
            target,
        })
    }
}

impl Walker for IntegerWalker {
    type State = i64;

    fn start(&self) -> i64 {
        0
    }

    fn step<R: Rng>(&self, x: i64, rng: &mut R) -> i64 {
        if rng.random::<f64>() < self.right {
            x + 1
        } else {
            x - 1
        }
    }

    fn is_target(&self, x: i64) -> bool {
        self.target == Some(x)
    }

    fn distance(&self, x: i64) -> u64 {
        x.unsigned_abs()
    }
}

/// One observed hitting time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitSample {
    pub replication: u64,
    /// `T`, or the step budget when censored.
    pub steps: u64,
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingSamples {
    pub max_steps: u64,
    pub samples: Vec<HitSample>,
}

impl HittingSamples {
    pub fn censored(&self) -> usize {
        self.samples.iter().filter(|s| s.censored).count()
    }

    /// Mean and standard error of the uncensored samples.
    pub fn mean(&self) -> (f64, f64) {
        let xs: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| !s.censored)
            .map(|s| s.steps as f64)
            .collect();
        mean_and_error(&xs)
    }

    /// Mean and standard error of `beta^T`; censored walks contribute 0,
    /// which is within `beta^max_steps` of their true contribution.
    pub fn transform(&self, beta: f64) -> (f64, f64) {
        let xs: Vec<f64> = self
            .samples
            .iter()
            .map(|s| {
                if s.censored {
                    0.0
                } else {
                    beta.powf(s.steps as f64)
                }
            })
            .collect();
        mean_and_error(&xs)
    }

    /// Number of samples with `T <= k`; requires `k <= max_steps`.
    pub fn count_at_most(&self, k: u64) -> Result<u64> {
        if k > self.max_steps {
            return domain(format!(
                "cannot count T <= {k} with a budget of {}",
                self.max_steps
            ));
        }
        Ok(self
            .samples
            .iter()
            .filter(|s| !s.censored && s.steps <= k)
            .count() as u64)
    }
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn hit<W: Walker>(walker: &W, max_steps: u64, rng: &mut ChaCha8Rng) -> (u64, bool) {
    let mut x = walker.start();
    if walker.is_target(x) {
        return (0, false);
    }
    for k in 1..=max_steps {
        x = walker.step(x, rng);
        if walker.is_target(x) {
            return (k, false);
        }
    }
    (max_steps, true)
}

/// Independent samples of `T`, censored at `config.max_steps`.
pub fn simulate_hitting<W: Walker>(walker: &W, config: &SimConfig) -> HittingSamples {
    let samples = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = config.rng(r);
            let (steps, censored) = hit(walker, config.max_steps, &mut rng);
            HitSample {
                replication: r,
                steps,
                censored,
            }
        })
        .collect();
    HittingSamples {
        max_steps: config.max_steps,
        samples,
    }
}

/// Binomial proportion with an exact (Clopper-Pearson) interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// `floor(a n + 1)`.
    pub steps: u64,
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Clopper-Pearson interval at confidence `level`; one-sided when the count
/// sits at either end.
pub fn clopper_pearson(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials || !(level > 0.0 && level < 1.0) {
        return domain(format!(
            "bad interval request: {successes} of {trials} at level {level}"
        ));
    }
    let alpha = 1.0 - level;
    let (x, n) = (successes as f64, trials as f64);
    let beta = |a: f64, b: f64, p: f64| -> Result<f64> {
        Beta::new(a, b)
            .map(|d| d.inverse_cdf(p))
            .map_err(|e| Error::Domain(e.to_string()))
    };
    Ok(if successes == 0 {
        (0.0, 1.0 - alpha.powf(1.0 / n))
    } else if successes == trials {
        (alpha.powf(1.0 / n), 1.0)
    } else {
        (
            beta(x, n - x + 1.0, alpha / 2.0)?,
            beta(x + 1.0, n - x, 1.0 - alpha / 2.0)?,
        )
    })
}

/// Estimates `P(T <= floor(a n + 1))` with walks stopped at that step.
pub fn estimate_tail<W: Walker>(
    walker: &W,
    a: f64,
    n: usize,
    config: &SimConfig,
    level: f64,
) -> Result<TailEstimate> {
    let steps = (a * n as f64 + 1.0).floor() as u64;
    let stopped = SimConfig {
        max_steps: steps,
        ..config.clone()
    };
    let samples = simulate_hitting(walker, &stopped);
    let successes = samples.count_at_most(steps)?;
    let (lower, upper) = clopper_pearson(successes, config.replications, level)?;
    Ok(TailEstimate {
        steps,
        successes,
        trials: config.replications,
        estimate: successes as f64 / config.replications as f64,
        lower,
        upper,
    })
}

/// `|X_k|` at each recorded step for every replication, ignoring targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeSamples {
    pub record: Vec<u64>,
    /// `distances[r][j] = |X_{record[j]}|` in replication `r`.
    pub distances: Vec<Vec<u64>>,
}

/// Per recorded step: mean ratio, 10/50/90% quantiles, and the mean over
/// replications of the running maximum of the ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub k: u64,
    pub mean: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub running_max: f64,
}

impl EscapeSamples {
    /// The statistic of `estimator` at step `k` for distance `d`.
    pub fn ratio(estimator: Estimator, k: u64, d: u64) -> f64 {
        let (k, d) = (k as f64, d as f64);
        match estimator {
            Estimator::SpeedRatio | Estimator::HittingTime => d / k,
            Estimator::SingleLogRatio => d / (k * k.ln()).sqrt(),
        }
    }

    pub fn summary(&self, estimator: Estimator) -> Vec<RatioSummary> {
        let reps = self.distances.len();
        let mut running = vec![f64::NEG_INFINITY; reps];
        self.record
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let mut values: Vec<f64> = self
                    .distances
                    .iter()
                    .map(|row| Self::ratio(estimator, k, row[j]))
                    .collect();
                for (m, &v) in running.iter_mut().zip(&values) {
                    *m = m.max(v);
                }
                let mean = values.iter().sum::<f64>() / reps as f64;
                values.sort_by(f64::total_cmp);
                let q = |p: f64| values[((reps - 1) as f64 * p).round() as usize];
                RatioSummary {
                    k,
                    mean,
                    q10: q(0.1),
                    median: q(0.5),
                    q90: q(0.9),
                    running_max: running.iter().sum::<f64>() / reps as f64,
                }
            })
            .collect()
    }
}

/// Records `|X_k|` along free walks (targets do not stop them).
pub fn escape_ratios<W: Walker>(walker: &W, config: &SimConfig) -> Result<EscapeSamples> {
    let mut record = config.record.clone();
    record.sort_unstable();
    record.dedup();
    if record.first() == Some(&0)
        || (config.estimator == Estimator::SingleLogRatio && record.first() == Some(&1))
    {
        return domain("record steps must be >= 1 (>= 2 for the single-log ratio)");
    }
    let last = record.last().copied().unwrap_or(0);
    if let Some(h) = walker.safe_horizon() {
        if last > h {
            return domain(format!(
                "step {last} is beyond the truncation safety horizon {h}"
            ));
        }
    }
    let distances = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = config.rng(r);
            let mut x = walker.start();
            let mut out = Vec::with_capacity(record.len());
            let mut next = 0;
            for k in 1..=last {
                x = walker.step(x, &mut rng);
                if record[next] == k {
                    out.push(walker.distance(x));
                    next += 1;
                }
            }
            out
        })
        .collect();
    Ok(EscapeSamples { record, distances })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    replication: u64,
    statistic: &'a str,
    k_or_t: u64,
    value: f64,
    censored: bool,
}

/// CSV with columns `replication,statistic,k_or_t,value,censored`.
pub fn write_hitting_csv<W: Write>(out: W, samples: &HittingSamples) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in &samples.samples {
        w.serialize(CsvRow {
            replication: s.replication,
            statistic: "hitting_time",
            k_or_t: s.steps,
            value: s.steps as f64,
            censored: s.censored,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Same columns; one `distance` row and one ratio row per recorded step.
pub fn write_escape_csv<W: Write>(
    out: W,
    samples: &EscapeSamples,
    estimator: Estimator,
) -> Result<()> {
    let name = match estimator {
        Estimator::SingleLogRatio => "single_log_ratio",
        _ => "speed_ratio",
    };
    let mut w = csv::Writer::from_writer(out);
    for (r, row) in samples.distances.iter().enumerate() {
        for (&k, &d) in samples.record.iter().zip(row) {
            for (statistic, value) in [
                ("distance", d as f64),
                (name, EscapeSamples::ratio(estimator, k, d)),
            ] {
                w.serialize(CsvRow {
                    replication: r as u64,
                    statistic,
                    k_or_t: k,
                    value,
                    censored: false,
                })
                .map_err(csv_error)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
