// SPDX-License-Identifier: MIT
//! Shared helpers for the integration tests: an independent fixed-step
//! master-equation oracle, exact initial-derivative references, derivative
//! extraction from sampled curves, and seeded random networks.
#![allow(dead_code)]

use bassnet_core::network::build_custom;
use bassnet_core::{Network, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Fixed-step classical Runge-Kutta integrator for the subset survival
/// system, built from scratch so it shares no code with the library's
/// adaptive solver and the two can check each other.
pub struct SubsetOracle {
    m: usize,
    rates: Vec<f64>,
    couplings: Vec<Vec<(usize, f64)>>,
}

impl SubsetOracle {
    pub fn new(net: &Network) -> Self {
        let m = net.m();
        let size = 1usize << m;
        let p = net.p();
        let mut rates = vec![0.0; size];
        let mut couplings: Vec<Vec<(usize, f64)>> = vec![Vec::new(); size];
        for mask in 1..size {
            let members: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
            let mut outflow: f64 = members.iter().map(|&i| p[i]).sum();
            let mut pairs = Vec::new();
            for l in 0..m {
                if mask & (1 << l) != 0 {
                    continue;
                }
                let w: f64 = members.iter().map(|&i| net.rate_between(l, i)).sum();
                if w > 0.0 {
                    outflow += w;
                    pairs.push((mask | (1 << l), w));
                }
            }
            rates[mask] = outflow;
            couplings[mask] = pairs;
        }
        Self {
            m,
            rates,
            couplings,
        }
    }

    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        dy[0] = 0.0;
        for mask in 1..y.len() {
            let mut rhs = -self.rates[mask] * y[mask];
            for &(sup, w) in &self.couplings[mask] {
                rhs += w * y[sup];
            }
            dy[mask] = rhs;
        }
    }

    /// Survival probabilities of every subset at every grid point, one row
    /// per point, indexed by subset bitmask within a row.
    pub fn survival_table(&self, grid: &TimeGrid, max_step: f64) -> Vec<Vec<f64>> {
        let size = 1usize << self.m;
        let mut y = vec![1.0; size];
        let mut k1 = vec![0.0; size];
        let mut k2 = vec![0.0; size];
        let mut k3 = vec![0.0; size];
        let mut k4 = vec![0.0; size];
        let mut stage = vec![0.0; size];
        let mut rows = Vec::with_capacity(grid.len());
        rows.push(y.clone());
        for window in grid.points().windows(2) {
            let dt = window[1] - window[0];
            let n_sub = (dt / max_step).ceil().max(1.0) as usize;
            let h = dt / n_sub as f64;
            for _ in 0..n_sub {
                self.derivative(&y, &mut k1);
                for i in 0..size {
                    stage[i] = y[i] + 0.5 * h * k1[i];
                }
                self.derivative(&stage, &mut k2);
                for i in 0..size {
                    stage[i] = y[i] + 0.5 * h * k2[i];
                }
                self.derivative(&stage, &mut k3);
                for i in 0..size {
                    stage[i] = y[i] + h * k3[i];
                }
                self.derivative(&stage, &mut k4);
                for i in 0..size {
                    y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
                }
            }
            rows.push(y.clone());
        }
        rows
    }

    /// The adoption curve, one minus the mean singleton survival.
    pub fn adoption_curve(&self, grid: &TimeGrid, max_step: f64) -> Vec<f64> {
        self.survival_table(grid, max_step)
            .iter()
            .map(|row| {
                let sum: f64 = (0..self.m).map(|k| row[1 << k]).sum();
                1.0 - sum / self.m as f64
            })
            .collect()
    }
}

/// Exact `(f'(0), f''(0), f'''(0))` for any network, from the subset system
/// differentiated at zero: with `A_k` the survival of node `k` and `A_kl`
/// of the pair `{k, l}`,
///
/// ```text
/// A_k''(0)  = p_k^2 - sum_l q_{l,k} p_l
/// A_kl''(0) = (p_k + p_l)^2 - sum_{j not in {k,l}} (q_{j,k} + q_{j,l}) p_j
/// A_k'''(0) = -(p_k + q_k) A_k''(0) + sum_l q_{l,k} A_kl''(0)
/// ```
///
/// and the derivatives of `f` are the negated means of the `A_k`
/// derivatives, except `f'(0)`, the mean of `p`.
pub fn oracle_initial_derivatives(net: &Network) -> (f64, f64, f64) {
    let m = net.m();
    let p = net.p();
    let mf = m as f64;
    let d1 = p.iter().sum::<f64>() / mf;

    let single_dd: Vec<f64> = (0..m)
        .map(|k| {
            let pull: f64 = net.in_edges(k).iter().map(|&(l, rate)| rate * p[l]).sum();
            p[k] * p[k] - pull
        })
        .collect();
    let d2 = -single_dd.iter().sum::<f64>() / mf;

    let pair_dd = |k: usize, l: usize| -> f64 {
        let ps = p[k] + p[l];
        let pull: f64 = (0..m)
            .filter(|&j| j != k && j != l)
            .map(|j| (net.rate_between(j, k) + net.rate_between(j, l)) * p[j])
            .sum();
        ps * ps - pull
    };
    let d3 = -(0..m)
        .map(|k| {
            let couple: f64 = net
                .in_edges(k)
                .iter()
                .map(|&(l, rate)| rate * pair_dd(k, l))
                .sum();
            -(p[k] + net.in_influence(k)) * single_dd[k] + couple
        })
        .sum::<f64>()
        / mf;
    (d1, d2, d3)
}

/// Sampling grid for initial-derivative extraction: seventeen points spaced
/// `0.01` apart.
pub fn derivative_grid() -> TimeGrid {
    TimeGrid::uniform(0.16, 17).unwrap()
}

/// Recovers `(f'(0), f''(0), f'''(0))` from a curve sampled on
/// [`derivative_grid`].
///
/// Five-point one-sided difference stencils anchored at `f(0) = 0` are
/// evaluated at spacings `0.04`, `0.02`, and `0.01` and combined by two
/// Richardson extrapolation levels. The stencils' leading error orders in
/// the spacing are four, three, and two for the first, second, and third
/// derivative, which fixes the extrapolation weights.
pub fn extract_initial_derivatives(values: &[f64]) -> (f64, f64, f64) {
    assert_eq!(values.len(), 17);
    let estimates = |stride: usize| -> [f64; 3] {
        let h = 0.01 * stride as f64;
        let g1 = values[stride];
        let g2 = values[2 * stride];
        let g3 = values[3 * stride];
        let g4 = values[4 * stride];
        [
            (4.0 * g1 - 3.0 * g2 + 4.0 / 3.0 * g3 - 0.25 * g4) / h,
            (-26.0 / 3.0 * g1 + 9.5 * g2 - 14.0 / 3.0 * g3 + 11.0 / 12.0 * g4) / (h * h),
            (9.0 * g1 - 12.0 * g2 + 7.0 * g3 - 1.5 * g4) / (h * h * h),
        ]
    };
    let coarse = estimates(4);
    let middle = estimates(2);
    let fine = estimates(1);
    let refine = |order: i32, a: f64, b: f64| -> f64 {
        let w = 2.0f64.powi(order);
        (w * b - a) / (w - 1.0)
    };
    let extrapolate = |order: i32, a: f64, b: f64, c: f64| -> f64 {
        refine(order + 1, refine(order, a, b), refine(order, b, c))
    };
    (
        extrapolate(4, coarse[0], middle[0], fine[0]),
        extrapolate(3, coarse[1], middle[1], fine[1]),
        extrapolate(2, coarse[2], middle[2], fine[2]),
    )
}

/// Deterministic random heterogeneous network: individual rates drawn from
/// `[0.05, 0.5]`, each ordered pair influencing with probability `0.7` at a
/// rate drawn from `[0.01, 0.3]`.
pub fn random_network(m: usize, seed: u64) -> Network {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let p: Vec<f64> = (0..m).map(|_| 0.05 + 0.45 * rng.random::<f64>()).collect();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let keep = rng.random::<f64>() < 0.7;
            let rate = 0.01 + 0.29 * rng.random::<f64>();
            if keep {
                edges.push((i, j, rate));
            }
        }
    }
    build_custom(p, edges).unwrap()
}

/// Largest absolute elementwise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
