//! Biased simple random walk on the integers, the comparison object for
//! every bound in this crate.
//!
//! The walk steps left with odds 1 and right with odds `g`. `T'_{0n}` is its
//! first passage time from 0 to `n`, a sum of `n` independent copies of
//! `T'_{01}`.

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};

/// Biased walk with left:right odds `1 : g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasedWalk {
    g: f64,
}

impl BiasedWalk {
    pub fn new(g: f64) -> Result<Self> {
        if g.is_finite() && g > 0.0 {
            Ok(Self { g })
        } else {
            domain(format!("odds g = {g} must be positive and finite"))
        }
    }

    pub fn odds(&self) -> f64 {
        self.g
    }

    pub fn right_probability(&self) -> f64 {
        self.g / (1.0 + self.g)
    }

    pub fn left_probability(&self) -> f64 {
        1.0 / (1.0 + self.g)
    }

    /// Asymptotic speed `(g - 1) / (g + 1)`.
    pub fn speed(&self) -> f64 {
        (self.g - 1.0) / (self.g + 1.0)
    }
}

/// `m_g = E T'_{01} = (g + 1) / (g - 1)`, infinite for `g <= 1`.
pub fn mean_m(g: f64) -> f64 {
    if g <= 1.0 {
        f64::INFINITY
    } else {
        (g + 1.0) / (g - 1.0)
    }
}

/// `log e^{-I_g(a)}`.
fn log_rate_factor(g: f64, a: f64) -> f64 {
    let am1 = a - 1.0;
    // (g / (a^2 - 1))^{(a-1)/2} -> 1 as a -> 1
    let middle = if am1 == 0.0 {
        0.0
    } else {
        0.5 * am1 * (g.ln() - (am1 * (a + 1.0)).ln())
    };
    g.ln() - (a + 1.0).ln() + middle + a * ((2.0 * a).ln() - (g + 1.0).ln())
}

/// Large deviation rate `I_g(a)` of `T'_{01}` on `[1, m_g]`.
pub fn rate_i(g: f64, a: f64) -> Result<f64> {
    if g <= 1.0 || !g.is_finite() {
        return domain(format!("rate function needs g > 1, got {g}"));
    }
    let m = mean_m(g);
    if !(1.0..=m * (1.0 + 1e-12)).contains(&a) {
        return domain(format!("a = {a} is outside [1, m_g = {m}]"));
    }
    Ok(-log_rate_factor(g, a.min(m)))
}

/// `E beta^{T'_{01}} = (g + 1 - sqrt((g + 1)^2 - 4 beta^2 g)) / (2 beta)`.
pub fn step_transform(g: f64, beta: f64) -> Result<f64> {
    if !(g >= 1.0 && g.is_finite()) {
        return domain(format!("step transform needs g >= 1, got {g}"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("beta = {beta} is outside (0, 1]"));
    }
    let disc = (g + 1.0) * (g + 1.0) - 4.0 * beta * beta * g;
    // Rationalized form of the smaller root; avoids cancellation near beta = 0.
    Ok(2.0 * beta * g / (g + 1.0 + disc.max(0.0).sqrt()))
}

/// Exact law of `T'_{0n}` up to `horizon`: `pmf[k] = P(T'_{0n} = k)`.
pub fn tn_pmf(g: f64, n: usize, horizon: usize) -> Result<Vec<f64>> {
    let walk = BiasedWalk::new(g)?;
    let (right, left) = (walk.right_probability(), walk.left_probability());
    let mut pmf = vec![0.0; horizon + 1];
    if n == 0 {
        pmf[0] = 1.0;
        return Ok(pmf);
    }
    // gap[d] = P(walk is d steps left of the target, not yet absorbed)
    let width = n + horizon + 2;
    let mut gap = vec![0.0; width];
    let mut next = vec![0.0; width];
    gap[n] = 1.0;
    for (k, slot) in pmf.iter_mut().enumerate().skip(1) {
        let lo = n.saturating_sub(k - 1).max(1);
        let hi = (n + k - 1).min(width - 2);
        for d in lo.saturating_sub(1)..=(hi + 1).min(width - 1) {
            next[d] = 0.0;
        }
        for d in lo..=hi {
            let m = gap[d];
            if m == 0.0 {
                continue;
            }
            next[d - 1] += m * right;
            next[d + 1] += m * left;
        }
        *slot = next[0];
        next[0] = 0.0;
        std::mem::swap(&mut gap, &mut next);
    }
    Ok(pmf)
}

/// `ln P[X_t >= n]` for the walk started at 0, by summing binomial terms in
/// log space.
pub fn log_position_tail(g: f64, t: u64, n: u64) -> Result<f64> {
    let walk = BiasedWalk::new(g)?;
    if n > t {
        return domain(format!("position tail needs t >= n, got t = {t}, n = {n}"));
    }
    let (ln_right, ln_left) = (walk.right_probability().ln(), walk.left_probability().ln());
    let tf = t as f64;
    let ln_t_fact = ln_gamma(tf + 1.0);
    // X_t = 2R - t with R ~ Bin(t, g / (1 + g)); X_t >= n iff R >= (t + n) / 2.
    let first = (t + n).div_ceil(2);
    let terms: Vec<f64> = (first..=t)
        .map(|r| {
            let rf = r as f64;
            ln_t_fact - ln_gamma(rf + 1.0) - ln_gamma(tf - rf + 1.0)
                + rf * ln_right
                + (tf - rf) * ln_left
        })
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max + terms.iter().map(|x| (x - max).exp()).sum::<f64>().ln())
}

/// `P[X_t >= n]`.
pub fn position_tail(g: f64, t: u64, n: u64) -> Result<f64> {
    log_position_tail(g, t, n).map(f64::exp)
}

/// Polynomial tail exponent `(alpha (p + 2) - 2)^2 / (8 alpha)`.
pub fn tapp_exponent(alpha: f64, p: f64) -> Result<f64> {
    if !(p >= 0.0) || !(alpha > 0.0) || alpha > 2.0 / (p + 2.0) * (1.0 + 1e-15) {
        return domain(format!(
            "exponent needs p >= 0 and 0 < alpha <= 2 / (p + 2), got alpha = {alpha}, p = {p}"
        ));
    }
    let d = alpha * (p + 2.0) - 2.0;
    Ok(d * d / (8.0 * alpha))
}
