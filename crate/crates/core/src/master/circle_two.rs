// SPDX-License-Identifier: MIT
//! Exact solver for two-sided circles.
//!
//! On a two-sided circle the survival sets that matter for node `j` are the
//! contiguous arcs containing `j`, indexed by how far they extend left (`a`)
//! and right (`b`). The subset system collapses to `m (m - 1) / 2 + 1`
//! equations per node, integrated numerically.

use super::{rotation_period, SolverError, MAX_NODES_TWO_SIDED};
use crate::curve::AdoptionCurve;
use crate::grid::TimeGrid;
use crate::network::{one_sided_circle_allowing_zero, Network};
use crate::ode::{integrate_to_grid, Rk45Options};

/// Per-node neighbor in-rates of a two-sided circle: entry `x` of the left
/// array is the rate of the edge from `x - 1 (mod m)` into `x`, entry `x`
/// of the right array the rate from `x + 1 (mod m)`, zero when absent.
fn extract_neighbor_rates(net: &Network) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let m = net.m();
    if m < 3 {
        return Err(SolverError::WrongStructure {
            expected: "two-sided circle",
            got: format!("{} with {m} nodes", net.structure()),
        });
    }
    let mut q_left = vec![0.0; m];
    let mut q_right = vec![0.0; m];
    for x in 0..m {
        let left = (x + m - 1) % m;
        let right = (x + 1) % m;
        for &(from, rate) in net.in_edges(x) {
            if from == left {
                q_left[x] = rate;
            } else if from == right {
                q_right[x] = rate;
            } else {
                return Err(SolverError::WrongStructure {
                    expected: "two-sided circle",
                    got: net.structure().to_string(),
                });
            }
        }
    }
    Ok((q_left, q_right))
}

/// Index of the arc reaching `a` nodes left and `b` nodes right of the
/// target, with `a + b <= m - 2`; the full circle sits one past the last
/// partial arc.
fn arc_index(a: usize, b: usize, m: usize) -> usize {
    a * (2 * m - a - 1) / 2 + b
}

/// Integrates the arc system for node `j` and returns the survival of the
/// single-node arc.
fn node_survival(
    j: usize,
    p: &[f64],
    prefix: &[f64],
    q_left: &[f64],
    q_right: &[f64],
    grid: &TimeGrid,
) -> Result<Vec<f64>, SolverError> {
    let m = p.len();
    let n_partial = m * (m - 1) / 2;
    let full = n_partial;
    let total_p = prefix[m];

    let psum = |s: usize, n: usize| {
        if s + n <= m {
            prefix[s + n] - prefix[s]
        } else {
            prefix[m] - prefix[s] + prefix[s + n - m]
        }
    };

    let mut rate = vec![0.0; n_partial];
    let mut left_in = vec![(0.0, 0usize); n_partial];
    let mut right_in = vec![(0.0, 0usize); n_partial];
    for a in 0..m - 1 {
        for b in 0..m - 1 - a {
            let idx = arc_index(a, b, m);
            let s = (j + m - a) % m;
            let e = (j + b) % m;
            rate[idx] = psum(s, a + b + 1) + q_left[s] + q_right[e];
            let grown_left = if a + b + 1 < m - 1 {
                arc_index(a + 1, b, m)
            } else {
                full
            };
            let grown_right = if a + b + 1 < m - 1 {
                arc_index(a, b + 1, m)
            } else {
                full
            };
            left_in[idx] = (q_left[s], grown_left);
            right_in[idx] = (q_right[e], grown_right);
        }
    }

    let deriv = |_t: f64, y: &[f64], dy: &mut [f64]| {
        for i in 0..n_partial {
            let (cl, tl) = left_in[i];
            let (cr, tr) = right_in[i];
            dy[i] = -rate[i] * y[i] + cl * y[tl] + cr * y[tr];
        }
        dy[full] = -total_p * y[full];
    };
    let y0 = vec![1.0; n_partial + 1];
    let rows = integrate_to_grid(deriv, y0, grid.points(), &Rk45Options::default())
        .map_err(|e| SolverError::Integration(e.to_string()))?;
    Ok(rows.iter().map(|row| row[0]).collect())
}

/// Solves a two-sided circle exactly, returning the adoption curve and the
/// per-node survival trajectories `[{j}](t)`.
///
/// Each node costs an integration of `m (m - 1) / 2 + 1` arc equations;
/// nodes related by a rotation symmetry of the rate profile are solved
/// once. Capped at [`MAX_NODES_TWO_SIDED`] nodes.
pub fn solve_twosided_circle(
    net: &Network,
    grid: &TimeGrid,
) -> Result<(AdoptionCurve, Vec<Vec<f64>>), SolverError> {
    let m = net.m();
    if m > MAX_NODES_TWO_SIDED {
        return Err(SolverError::TooManyNodes {
            m,
            cap: MAX_NODES_TWO_SIDED,
            backend: "two-sided circle solver",
        });
    }
    let p = net.p();
    let (q_left, q_right) = extract_neighbor_rates(net)?;
    let period = rotation_period(&[p, &q_left, &q_right]);

    let mut prefix = vec![0.0; m + 1];
    for (i, &pi) in p.iter().enumerate() {
        prefix[i + 1] = prefix[i] + pi;
    }

    let mut survivals: Vec<Vec<f64>> = Vec::with_capacity(m);
    for j in 0..period {
        survivals.push(node_survival(j, p, &prefix, &q_left, &q_right, grid)?);
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

/// Builds the one-sided circle whose in-rates match the two-sided circle's
/// total neighbor influence, `q_in[j] = q_left[j] + q_right[j]`.
///
/// For rotation-homogeneous rates the two networks produce identical
/// adoption curves; heterogeneous instances generally do not.
pub fn convert_two_sided_to_one_sided(net: &Network) -> Result<Network, SolverError> {
    let (q_left, q_right) = extract_neighbor_rates(net)?;
    let q_in: Vec<f64> = q_left.iter().zip(&q_right).map(|(l, r)| l + r).collect();
    one_sided_circle_allowing_zero(net.p().to_vec(), q_in).map_err(|e| {
        SolverError::WrongStructure {
            expected: "one-sided circle",
            got: e.to_string(),
        }
    })
}
