//! Solvers for `(I - beta K) x = b` restricted to a set of transient states.
//!
//! Path-shaped state sets are solved by tridiagonal elimination in linear
//! time, small ones by dense LU, and anything else by conjugate gradients on
//! the symmetrized system (the walk is reversible, so `D^{1/2} K D^{-1/2}`
//! is symmetric for the vertex-weight diagonal `D`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest state count solved densely.
pub const DENSE_LIMIT: usize = 2000;
const CG_TOLERANCE: f64 = 1e-12;

pub(crate) struct KilledSystem<'a> {
    graph: &'a WeightedGraph,
    beta: f64,
    states: Vec<usize>,
    position: Vec<Option<usize>>,
    vertex_weight: Vec<f64>,
}

impl<'a> KilledSystem<'a> {
    /// `states` must be non-target vertices with positive weight.
    pub fn new(graph: &'a WeightedGraph, beta: f64, states: Vec<usize>) -> Self {
        let mut position = vec![None; graph.num_vertices()];
        for (k, &s) in states.iter().enumerate() {
            position[s] = Some(k);
        }
        let vertex_weight = states.iter().map(|&s| graph.weight_of(s)).collect();
        Self {
            graph,
            beta,
            states,
            position,
            vertex_weight,
        }
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Entries `beta K(x, y)` between states, as (state index, value).
    fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let x = self.states[k];
        let scale = self.beta / self.vertex_weight[k];
        self.graph
            .neighbors(x)
            .iter()
            .filter_map(move |&(y, w)| self.position[y].map(|j| (j, scale * w)))
    }

    /// `(beta K) v` on states.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.row(k).map(|(j, q)| q * v[j]).sum())
            .collect()
    }

    /// Solves `(I - beta K) x = b`, or its transpose.
    pub fn solve(&self, rhs: &[f64], transpose: bool) -> Result<Vec<f64>> {
        debug_assert_eq!(rhs.len(), self.len());
        if self.len() == 0 {
            return Ok(Vec::new());
        }
        if let Some(order) = self.path_order() {
            return Ok(self.solve_tridiagonal(&order, rhs, transpose));
        }
        if self.len() <= DENSE_LIMIT {
            return self.solve_dense(rhs, transpose);
        }
        self.solve_cg(rhs, transpose)
    }

    /// The dense matrix `I - beta K` on states.
    pub fn dense_matrix(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut a = DMatrix::<f64>::identity(m, m);
        for k in 0..m {
            for (j, q) in self.row(k) {
                a[(k, j)] -= q;
            }
        }
        a
    }

    fn solve_dense(&self, rhs: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let mut a = self.dense_matrix();
        if transpose {
            a.transpose_mut();
        }
        let b = DVector::from_column_slice(rhs);
        a.lu()
            .solve(&b)
            .map(|x| x.as_slice().to_vec())
            .ok_or_else(|| Error::InfiniteExpectation("singular killed system".into()))
    }

    /// Orders the states along a path when the state graph is one.
    fn path_order(&self) -> Option<Vec<usize>> {
        let m = self.len();
        if m <= 2 {
            return Some((0..m).collect());
        }
        let mut links = vec![[usize::MAX; 2]; m];
        let mut degree = vec![0usize; m];
        for k in 0..m {
            for (j, _) in self.row(k) {
                if j == k {
                    continue;
                }
                if degree[k] == 2 {
                    return None;
                }
                links[k][degree[k]] = j;
                degree[k] += 1;
            }
        }
        let start = (0..m).find(|&k| degree[k] <= 1)?;
        let mut order = Vec::with_capacity(m);
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            order.push(cur);
            let next = links[cur][..degree[cur]]
                .iter()
                .copied()
                .find(|&j| j != prev);
            match next {
                Some(j) if order.len() < m => {
                    prev = cur;
                    cur = j;
                }
                _ => break,
            }
        }
        (order.len() == m).then_some(order)
    }

    fn solve_tridiagonal(&self, order: &[usize], rhs: &[f64], transpose: bool) -> Vec<f64> {
        let m = order.len();
        let q = |a: usize, b: usize| -> f64 {
            self.row(a).filter(|&(j, _)| j == b).map(|(_, v)| v).sum()
        };
        let mut diag = vec![0.0; m];
        let mut lower = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut r: Vec<f64> = order.iter().map(|&k| rhs[k]).collect();
        for i in 0..m {
            diag[i] = 1.0 - q(order[i], order[i]);
            if i > 0 {
                let (a, b) = if transpose {
                    (order[i - 1], order[i])
                } else {
                    (order[i], order[i - 1])
                };
                lower[i] = -q(a, b);
            }
            if i + 1 < m {
                let (a, b) = if transpose {
                    (order[i + 1], order[i])
                } else {
                    (order[i], order[i + 1])
                };
                upper[i] = -q(a, b);
            }
        }
        for i in 1..m {
            let factor = lower[i] / diag[i - 1];
            diag[i] -= factor * upper[i - 1];
            r[i] -= factor * r[i - 1];
        }
        let mut x_path = vec![0.0; m];
        x_path[m - 1] = r[m - 1] / diag[m - 1];
        for i in (0..m - 1).rev() {
            x_path[i] = (r[i] - upper[i] * x_path[i + 1]) / diag[i];
        }
        let mut x = vec![0.0; m];
        for (i, &k) in order.iter().enumerate() {
            x[k] = x_path[i];
        }
        x
    }

    fn solve_cg(&self, rhs: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let m = self.len();
        let sqrt_w: Vec<f64> = self.vertex_weight.iter().map(|w| w.sqrt()).collect();
        // A = D^{-1/2} A_s D^{1/2}
        let b: Vec<f64> = (0..m)
            .map(|k| {
                if transpose {
                    rhs[k] / sqrt_w[k]
                } else {
                    rhs[k] * sqrt_w[k]
                }
            })
            .collect();
        let apply_sym = |v: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|k| {
                    let x = self.states[k];
                    let mut acc = v[k];
                    for &(y, w) in self.graph.neighbors(x) {
                        if let Some(j) = self.position[y] {
                            acc -= self.beta * w / (sqrt_w[k] * sqrt_w[j]) * v[j];
                        }
                    }
                    acc
                })
                .collect()
        };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let b_norm = dot(&b, &b).sqrt();
        let mut y = vec![0.0; m];
        if b_norm == 0.0 {
            return Ok(y);
        }
        let mut r = b.clone();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let cap = (10 * m + 1000).min(1_000_000);
        let mut iterations = 0;
        while rr.sqrt() > CG_TOLERANCE * b_norm {
            if iterations == cap {
                return Err(Error::NoConvergence {
                    residual: rr.sqrt() / b_norm,
                    iterations,
                });
            }
            let ap = apply_sym(&p);
            let alpha = rr / dot(&p, &ap);
            for k in 0..m {
                y[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_next = dot(&r, &r);
            let ratio = rr_next / rr;
            for k in 0..m {
                p[k] = r[k] + ratio * p[k];
            }
            rr = rr_next;
            iterations += 1;
        }
        Ok((0..m)
            .map(|k| {
                if transpose {
                    y[k] * sqrt_w[k]
                } else {
                    y[k] / sqrt_w[k]
                }
            })
            .collect())
    }

    #[cfg(test)]
    pub fn solve_with(&self, rhs: &[f64], transpose: bool, method: Method) -> Result<Vec<f64>> {
        match method {
            Method::Tridiagonal => {
                let order = self.path_order().expect("path-shaped states");
                Ok(self.solve_tridiagonal(&order, rhs, transpose))
            }
            Method::Dense => self.solve_dense(rhs, transpose),
            Method::Cg => self.solve_cg(rhs, transpose),
        }
    }
}

#[cfg(test)]
#[derive(Clone, Copy, Debug)]
pub enum Method {
    Tridiagonal,
    Dense,
    Cg,
}
