// SPDX-License-Identifier: MIT
//! Exact solver for one-sided circles.
//!
//! On a one-sided circle the survival sets that matter for node `j` are the
//! contiguous arcs ending at `j`, so the subset system collapses from `2^m`
//! equations to a bidiagonal chain of `m` equations per node. The chain has
//! an explicit exponential-sum solution; when its coefficient denominators
//! nearly vanish the solver integrates the chain numerically for that node
//! instead.

use super::{rotation_period, SolverError, COEFF_GUARD, DEGENERATE_REL_TOL};
use crate::curve::AdoptionCurve;
use crate::grid::TimeGrid;
use crate::network::Network;
use crate::ode::{integrate_to_grid, Rk45Options};

/// Per-node in-rates of a one-sided circle: entry `x` is the rate of the
/// edge from `x - 1 (mod m)` into `x`, zero when that edge is absent.
fn extract_in_rates(net: &Network) -> Result<Vec<f64>, SolverError> {
    let m = net.m();
    let mut q_in = vec![0.0; m];
    for x in 0..m {
        let from_left = (x + m - 1) % m;
        match net.in_edges(x) {
            [] => {}
            [(from, rate)] if *from == from_left => q_in[x] = *rate,
            _ => {
                return Err(SolverError::WrongStructure {
                    expected: "one-sided circle",
                    got: net.structure().to_string(),
                })
            }
        }
    }
    Ok(q_in)
}

/// Arc bookkeeping for the chain ending at node `j`: `start(k)` is the
/// leftmost node of the arc of size `k`, and `psum(s, n)` sums `p` over `n`
/// consecutive nodes starting at `s`.
struct Chain<'a> {
    j: usize,
    m: usize,
    q_in: &'a [f64],
    prefix: Vec<f64>,
}

impl<'a> Chain<'a> {
    fn new(j: usize, p: &[f64], q_in: &'a [f64]) -> Self {
        let m = p.len();
        let mut prefix = vec![0.0; m + 1];
        for (i, &pi) in p.iter().enumerate() {
            prefix[i + 1] = prefix[i] + pi;
        }
        Self { j, m, q_in, prefix }
    }

    fn total_p(&self) -> f64 {
        self.prefix[self.m]
    }

    fn start(&self, k: usize) -> usize {
        (self.j + self.m + 1 - k) % self.m
    }

    fn psum(&self, s: usize, n: usize) -> f64 {
        if s + n <= self.m {
            self.prefix[s + n] - self.prefix[s]
        } else {
            self.prefix[self.m] - self.prefix[s] + self.prefix[s + n - self.m]
        }
    }

    /// Outflow rate of the arc of size `k < m`.
    fn arc_rate(&self, k: usize) -> f64 {
        let s = self.start(k);
        self.psum(s, k) + self.q_in[s]
    }
}

/// Evaluates the closed-form survival of node `j` on the grid, or `None`
/// when a coefficient denominator is near-degenerate or a coefficient
/// overflows the cancellation guard.
fn closed_form_survival(chain: &Chain<'_>, grid: &TimeGrid) -> Option<Vec<f64>> {
    let m = chain.m;

    // lambda[l] for l = 1..=m, slot 0 unused.
    let mut lambda = vec![0.0; m + 1];
    for k in 1..m {
        lambda[k] = -chain.arc_rate(k);
    }
    lambda[m] = -chain.total_p();

    // v[l][k] = product of Q_i / (lambda_l - lambda_i) over i = k..l-1,
    // built as a running product in u_idx = l - i; v[l][l] = 1.
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    v.push(Vec::new());
    for l in 1..=m {
        let mut row = vec![0.0; l + 1];
        row[l] = 1.0;
        let s_l = chain.start(l);
        let mut prod = 1.0;
        for u_idx in 1..l {
            let u = (s_l + u_idx) % m;
            let q_u = chain.q_in[u];
            let factor = if q_u == 0.0 {
                0.0
            } else {
                let gap = chain.psum(s_l, u_idx) + if l < m { chain.q_in[s_l] } else { 0.0 };
                let denom = gap - q_u;
                if denom.abs() <= DEGENERATE_REL_TOL * gap.max(q_u) {
                    return None;
                }
                -q_u / denom
            };
            prod *= factor;
            if prod.abs() > COEFF_GUARD {
                return None;
            }
            row[l - u_idx] = prod;
        }
        v.push(row);
    }

    // c[l] from the initial conditions, top down.
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    for k in (1..m).rev() {
        let mut value = 1.0;
        for l in (k + 1)..=m {
            value -= v[l][k] * c[l];
        }
        if value.abs() > COEFF_GUARD {
            return None;
        }
        c[k] = value;
    }

    let weights: Vec<f64> = (1..=m).map(|l| c[l] * v[l][1]).collect();
    if weights.iter().any(|w| w.abs() > COEFF_GUARD) {
        return None;
    }
    let survival = grid
        .points()
        .iter()
        .map(|&t| {
            weights
                .iter()
                .zip(&lambda[1..])
                .map(|(&w, &lam)| w * (lam * t).exp())
                .sum()
        })
        .collect();
    Some(survival)
}

/// Integrates the bidiagonal arc chain for node `j` and returns the
/// survival of the single-node arc.
fn numeric_survival(chain: &Chain<'_>, grid: &TimeGrid) -> Result<Vec<f64>, SolverError> {
    let m = chain.m;
    let rates: Vec<f64> = (1..m).map(|k| chain.arc_rate(k)).collect();
    let inflow: Vec<f64> = (1..m).map(|k| chain.q_in[chain.start(k)]).collect();
    let total_p = chain.total_p();

    let deriv = |_t: f64, y: &[f64], dy: &mut [f64]| {
        for k in 0..m - 1 {
            dy[k] = -rates[k] * y[k] + inflow[k] * y[k + 1];
        }
        dy[m - 1] = -total_p * y[m - 1];
    };
    let rows = integrate_to_grid(deriv, vec![1.0; m], grid.points(), &Rk45Options::default())
        .map_err(|e| SolverError::Integration(e.to_string()))?;
    Ok(rows.iter().map(|row| row[0]).collect())
}

/// Solves a one-sided circle exactly, returning the adoption curve and the
/// per-node survival trajectories `[{j}](t)`.
///
/// Each node costs `O(m^2)` through the closed form; nodes related by a
/// rotation symmetry of the rate profile are solved once. Nodes whose
/// closed-form coefficients are ill-conditioned fall back to numeric
/// integration of their arc chain.
pub fn solve_onesided_circle(
    net: &Network,
    grid: &TimeGrid,
) -> Result<(AdoptionCurve, Vec<Vec<f64>>), SolverError> {
    let m = net.m();
    let p = net.p();
    let q_in = extract_in_rates(net)?;
    let period = rotation_period(&[p, &q_in]);

    let mut survivals: Vec<Vec<f64>> = Vec::with_capacity(m);
    for j in 0..period {
        let chain = Chain::new(j, p, &q_in);
        let survival = match closed_form_survival(&chain, grid) {
            Some(values) => values,
            None => numeric_survival(&chain, grid)?,
        };
        survivals.push(survival);
    }
    for j in period..m {
        survivals.push(survivals[j % period].clone());
    }

    let mut values = vec![0.0; grid.len()];
    for survival in &survivals {
        for (v, s) in values.iter_mut().zip(survival) {
            *v += s;
        }
    }
    for v in &mut values {
        *v = 1.0 - *v / m as f64;
    }
    Ok((AdoptionCurve::exact(grid.clone(), values), survivals))
}
