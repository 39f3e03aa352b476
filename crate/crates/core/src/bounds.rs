//! Lower bounds on hitting times in terms of the distance `n + 1` between
//! origin and targets and the weight ratio `w_z / w_o`, and a harness that
//! checks them against exact values.
//!
//! With `n = dist(o, z) - 1` and `g > 1` chosen either as the root of
//! `(g - 1)^2 g^(n-2) = 2 w_z / w_o` or as `(w_z r_oz)^(1/n)`:
//!
//! * `E T_oz >= m_g n + 1`,
//! * `P(T_oz <= a n + 1) <= exp(-I_g(a) n)` for `1 <= a <= m_g`,
//! * `E beta^T_oz <= beta E beta^(T'_0n)` for every `beta` in `(0, 1]`,
//!
//! where `T'_0n` is the passage time of the biased walk of
//! [`reference`](crate::reference).

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact;
use crate::graph::WeightedGraph;
use crate::reference::{mean_m, rate_i, step_transform, tapp_exponent};

/// Odds at or below `1 + VACUOUS_GAP` give no usable bound.
pub const VACUOUS_GAP: f64 = 1e-12;
/// Relative slack granted to the mean and tail comparisons.
pub const RELATIVE_SLACK: f64 = 1e-9;
/// Absolute slack granted to the transform comparison.
pub const LAPLACE_SLACK: f64 = 1e-9;

const BISECTION_TOLERANCE: f64 = 1e-13;
const BISECTION_ITERATIONS: usize = 200;

/// Root `g > 1` of `(g - 1)^2 g^(n-2) = 2 ratio`.
pub fn solve_g_a(n: usize, ratio: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateDistance(1));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return domain(format!("weight ratio {ratio} must be positive and finite"));
    }
    // Bisection on u = g - 1 of a function increasing in u.
    let target = (2.0 * ratio).ln();
    let f = |u: f64| (n as f64 - 2.0) * u.ln_1p() + 2.0 * u.ln() - target;
    let mut hi = 1.0 + (2.0 * ratio).sqrt();
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while f(lo) > 0.0 {
        lo /= 2.0;
        if lo < f64::MIN_POSITIVE {
            return Ok(1.0);
        }
    }
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOLERANCE * hi {
            break;
        }
    }
    Ok(1.0 + 0.5 * (lo + hi))
}

/// Explicit upper bound on [`solve_g_a`]: with `alpha = max(n^2 ratio, e)`,
/// `g' = (5 alpha / log(alpha)^2)^(1/(n-2))`. Needs `n >= 3`.
pub fn g_prime(n: usize, ratio: f64) -> Result<f64> {
    if n < 3 {
        return domain(format!("explicit bound needs n >= 3, got {n}"));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return domain(format!("weight ratio {ratio} must be positive and finite"));
    }
    let alpha = ((n * n) as f64 * ratio).max(E);
    let ln_alpha = alpha.ln();
    Ok((5.0 * alpha / (ln_alpha * ln_alpha)).powf(1.0 / (n as f64 - 2.0)))
}

/// `(w_z r_oz)^(1/n)` for `n = dist(o, z) - 1`, on the reduced graph.
pub fn g_b(graph: &WeightedGraph) -> Result<f64> {
    let reduced = reduce(graph);
    let n = admissible_n(&reduced)?;
    let r = exact::effective_resistance(&reduced)?;
    Ok(odds_b(&reduced, n, r))
}

fn odds_b(reduced: &WeightedGraph, n: usize, resistance: f64) -> f64 {
    ((reduced.target_weight() * resistance).ln() / n as f64).exp()
}

/// `m_g n + 1`, infinite for `g <= 1`.
pub fn mean_lower_bound(n: usize, g: f64) -> f64 {
    mean_m(g) * n as f64 + 1.0
}

/// `exp(-I_g(a) n)`.
pub fn ld_upper_bound(n: usize, g: f64, a: f64) -> Result<f64> {
    Ok((-rate_i(g, a)? * n as f64).exp())
}

/// `beta phi_g(beta)^n = E beta^(T'_0n + 1)`.
pub fn laplace_upper(n: usize, g: f64, beta: f64) -> Result<f64> {
    let phi = step_transform(g, beta)?;
    Ok(beta * (n as f64 * phi.ln()).exp())
}

/// `2 n^2 / ((p + 2) log n)`.
pub fn poly_mean_asymptotic(n: f64, p: f64) -> Result<f64> {
    if !(n > 1.0) || !(p >= 0.0) {
        return domain(format!(
            "asymptotic needs n > 1 and p >= 0, got n = {n}, p = {p}"
        ));
    }
    Ok(2.0 * n * n / ((p + 2.0) * n.ln()))
}

/// Tail exponent for polynomial growth power `p`.
pub fn poly_ld_exponent(alpha: f64, p: f64) -> Result<f64> {
    tapp_exponent(alpha, p)
}

/// `count` points spaced geometrically strictly inside `(1, m_g)`.
pub fn default_a_grid(g: f64, count: usize) -> Vec<f64> {
    let m = mean_m(g);
    if !m.is_finite() {
        return Vec::new();
    }
    (1..=count)
        .map(|i| (m.ln() * i as f64 / (count + 1) as f64).exp())
        .collect()
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// Which choice of `g` a verdict refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GOption {
    /// Root of `(g - 1)^2 g^(n-2) = 2 w_z / w_o`.
    A,
    /// `(w_z r_oz)^(1/n)`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `E T >= m_g n + 1`.
    Mean,
    /// `P(T <= a n + 1) <= exp(-I_g(a) n)`.
    Tail,
    /// `E beta^T <= beta phi_g(beta)^n`.
    Laplace,
    /// `g_a <= g'`.
    ExplicitOdds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The odds were too close to 1 for the bound to say anything.
    VacuousPass,
    /// The exact side was beyond the computed horizon.
    Unchecked,
}

/// One inequality evaluated at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: Check,
    pub option: GOption,
    /// `a` for tails, `beta` for transforms.
    pub parameter: Option<f64>,
    #[serde(with = "crate::report::extended_f64")]
    pub exact: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub bound: f64,
    /// Distance from violation, in the direction of the inequality.
    #[serde(with = "crate::report::extended_f64")]
    pub margin: f64,
    pub status: Status,
}

impl Verdict {
    fn lower(
        check: Check,
        option: GOption,
        parameter: Option<f64>,
        exact: f64,
        bound: f64,
    ) -> Self {
        let status = if exact >= bound * (1.0 - RELATIVE_SLACK) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check,
            option,
            parameter,
            exact,
            bound,
            margin: exact - bound,
            status,
        }
    }

    fn upper(
        check: Check,
        option: GOption,
        parameter: Option<f64>,
        exact: f64,
        bound: f64,
        allowed: f64,
    ) -> Self {
        let status = if exact <= allowed {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check,
            option,
            parameter,
            exact,
            bound,
            margin: bound - exact,
            status,
        }
    }

    fn marked(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

/// Bounds and verdicts for one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `dist(o, z)` on the reduced graph.
    pub distance: usize,
    /// Largest admissible `n`, always `distance - 1`.
    pub n: usize,
    pub origin_weight: f64,
    pub target_weight: f64,
    pub ratio: f64,
    pub expected_t: f64,
    pub resistance: f64,
    pub g_a: f64,
    pub g_prime: Option<f64>,
    pub g_b: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub mean_bound_a: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub mean_bound_b: f64,
    pub verdicts: Vec<Verdict>,
}

impl BoundReport {
    pub fn g(&self, option: GOption) -> f64 {
        match option {
            GOption::A => self.g_a,
            GOption::B => self.g_b,
        }
    }

    /// `(a, exp(-I_g(a) n))` pairs for one option.
    pub fn ld_curve(&self, option: GOption) -> Vec<(f64, f64)> {
        self.verdicts
            .iter()
            .filter(|v| v.check == Check::Tail && v.option == option)
            .filter_map(|v| v.parameter.map(|a| (a, v.bound)))
            .collect()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Grids and limits for [`check_theorem1`].
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremConfig {
    /// Explicit `a` values; points outside `[1, m_g)` are skipped. `None`
    /// uses [`default_a_grid`] with [`TheoremConfig::a_points`] points.
    pub a_grid: Option<Vec<f64>>,
    pub a_points: usize,
    pub beta_grid: Vec<f64>,
    /// Largest pmf horizon computed for tail checks.
    pub max_horizon: usize,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            a_grid: None,
            a_points: 12,
            beta_grid: default_beta_grid(),
            max_horizon: exact::HORIZON_CAP,
        }
    }
}

/// Targets merged and inaccessible vertices dropped; the hitting-time law
/// from the origin is unchanged.
pub fn reduce(graph: &WeightedGraph) -> WeightedGraph {
    graph.contract_targets().restrict_accessible()
}

fn admissible_n(reduced: &WeightedGraph) -> Result<usize> {
    match reduced.origin_target_distance() {
        None => Err(Error::InfiniteExpectation(
            "targets unreachable from the origin".into(),
        )),
        Some(d) if d < 2 => Err(Error::DegenerateDistance(d)),
        Some(d) => Ok(d - 1),
    }
}

/// Evaluates every bound on `graph` and compares it with exact values.
///
/// The graph is first [`reduce`]d, which can only shrink `w_z` and so only
/// sharpens the bounds.
pub fn check_theorem1(graph: &WeightedGraph, config: &TheoremConfig) -> Result<BoundReport> {
    let reduced = reduce(graph);
    let n = admissible_n(&reduced)?;
    let origin_weight = reduced.weight_of(reduced.origin());
    let target_weight = reduced.target_weight();
    let ratio = target_weight / origin_weight;
    let expected_t = exact::expected_hitting_time(&reduced)?;
    let resistance = exact::effective_resistance(&reduced)?;

    let g_a = solve_g_a(n, ratio)?;
    let g_prime = (n >= 3).then(|| g_prime(n, ratio)).transpose()?;
    let g_b = odds_b(&reduced, n, resistance);
    let options = [(GOption::A, g_a), (GOption::B, g_b)];

    let grids: Vec<Vec<f64>> = options.iter().map(|&(_, g)| grid_for(g, config)).collect();
    let needed = options
        .iter()
        .zip(&grids)
        .flat_map(|(_, grid)| grid.iter().map(|&a| tail_steps(n, a)))
        .max()
        .unwrap_or(0);
    let horizon = needed.min(config.max_horizon);
    let stats = exact::hitting_time_pmf(&reduced, horizon)?;

    let mut verdicts = Vec::new();
    for (&(option, g), grid) in options.iter().zip(&grids) {
        let vacuous = g <= 1.0 + VACUOUS_GAP;
        let mean_bound = mean_lower_bound(n, g);
        let v = Verdict::lower(Check::Mean, option, None, expected_t, mean_bound);
        verdicts.push(if vacuous {
            v.marked(Status::VacuousPass)
        } else {
            v
        });

        for &a in grid {
            let bound = ld_upper_bound(n, g, a)?;
            let k = tail_steps(n, a);
            let exact = stats.cdf(k);
            let v = Verdict::upper(
                Check::Tail,
                option,
                Some(a),
                exact,
                bound,
                bound * (1.0 + RELATIVE_SLACK),
            );
            verdicts.push(if k > horizon {
                v.marked(Status::Unchecked)
            } else {
                v
            });
        }

        for &beta in &config.beta_grid {
            let exact = exact::survival_transform(&reduced, beta)?;
            let bound = if vacuous {
                beta
            } else {
                laplace_upper(n, g, beta)?
            };
            let v = Verdict::upper(
                Check::Laplace,
                option,
                Some(beta),
                exact,
                bound,
                bound + LAPLACE_SLACK,
            );
            verdicts.push(if vacuous && v.status == Status::Pass {
                v.marked(Status::VacuousPass)
            } else {
                v
            });
        }
    }
    if let Some(gp) = g_prime {
        verdicts.push(Verdict::lower(
            Check::ExplicitOdds,
            GOption::A,
            None,
            gp,
            g_a,
        ));
    }

    Ok(BoundReport {
        distance: n + 1,
        n,
        origin_weight,
        target_weight,
        ratio,
        expected_t,
        resistance,
        g_a,
        g_prime,
        g_b,
        mean_bound_a: mean_lower_bound(n, g_a),
        mean_bound_b: mean_lower_bound(n, g_b),
        verdicts,
    })
}

fn grid_for(g: f64, config: &TheoremConfig) -> Vec<f64> {
    if g <= 1.0 + VACUOUS_GAP {
        return Vec::new();
    }
    match &config.a_grid {
        None => default_a_grid(g, config.a_points),
        Some(values) => {
            let m = mean_m(g);
            values
                .iter()
                .copied()
                .filter(|a| (1.0..m).contains(a))
                .collect()
        }
    }
}

/// `floor(a n + 1)`.
fn tail_steps(n: usize, a: f64) -> usize {
    (a * n as f64 + 1.0).floor() as usize
}
