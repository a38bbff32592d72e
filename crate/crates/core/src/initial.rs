// SPDX-License-Identifier: MIT
//! Exact initial derivatives of the adoption fraction.
//!
//! Writing `f(t)` for the expected adoption fraction, the first derivatives
//! at `t = 0` have closed expressions in the network rates:
//!
//! - `f'(0)` is the mean individual rate and is blind to the network;
//! - `f''(0)` sees each node's rate paired with its outgoing influence;
//! - `f'''(0)` is available where enough symmetry holds (uniform `p` on
//!   mildly heterogeneous complete networks, and Cartesian tori).

use crate::network::{MildHetSpec, Network};
use thiserror::Error;

/// Errors raised by the derivative formulas.
#[derive(Debug, Error, PartialEq)]
pub enum InitialError {
    /// Torus dimension must be at least one.
    #[error("torus dimension must be at least 1, got {0}")]
    DimensionTooSmall(usize),
    /// Rates must be finite with the stated signs.
    #[error("invalid rate {name} = {value}")]
    BadRate { name: &'static str, value: f64 },
}

/// The first derivatives of `f` at `t = 0`. `d3` is populated only where a
/// closed expression exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDerivatives {
    pub d1: f64,
    pub d2: f64,
    pub d3: Option<f64>,
}

/// Derivatives for an arbitrary network:
/// `f'(0) = mean(p)` and `f''(0) = mean over i of p_i (q^i - p_i)` with
/// `q^i` the outgoing influence of node `i`.
pub fn derivatives_general(net: &Network) -> InitialDerivatives {
    let m = net.m() as f64;
    let d1 = net.total_p() / m;
    let d2 = net
        .p()
        .iter()
        .enumerate()
        .map(|(i, &pi)| pi * (net.out_influence(i) - pi))
        .sum::<f64>()
        / m;
    InitialDerivatives { d1, d2, d3: None }
}

/// Derivatives for the mildly heterogeneous complete network described by
/// `spec`. The third derivative requires uniform individual rates and is
/// `None` otherwise.
pub fn derivatives_mild_het(spec: &MildHetSpec) -> InitialDerivatives {
    let m = spec.m() as f64;
    let p = spec.p();
    let q = spec.q_node();
    let sum_p: f64 = p.iter().sum();
    let sum_q: f64 = q.iter().sum();
    let sum_pq: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    let sum_p2: f64 = p.iter().map(|a| a * a).sum();

    let d1 = sum_p / m;
    let d2 = (sum_q * sum_p - sum_pq) / (m * (m - 1.0)) - sum_p2 / m;

    let d3 = if p.iter().all(|&pi| pi == p[0]) {
        let pu = p[0];
        let sum_q2: f64 = q.iter().map(|a| a * a).sum();
        let denom = (m - 1.0) * (m - 1.0);
        Some(
            pu.powi(3)
                + pu / m
                    * ((m - 2.0) / denom * sum_q * sum_q
                        - (2.0 * m - 3.0) / denom * sum_q2
                        - 4.0 * pu * sum_q),
        )
    } else {
        None
    };
    InitialDerivatives { d1, d2, d3 }
}

/// Derivatives for the homogeneous Cartesian torus of dimension `dim` with
/// individual rate `p > 0` and total per-node influence `q >= 0`:
///
/// ```text
/// f'(0)   = p
/// f''(0)  = p (q - p)
/// f'''(0) = p (p^2 - 4 p q + ((dim - 1) / dim) q^2)
/// ```
///
/// The third derivative increases strictly in `dim` toward the dense limit
/// `p (p^2 - 4 p q + q^2)`, the gap being exactly `p q^2 / dim`.
pub fn derivatives_cartesian(dim: usize, p: f64, q: f64) -> Result<InitialDerivatives, InitialError> {
    if dim < 1 {
        return Err(InitialError::DimensionTooSmall(dim));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(InitialError::BadRate { name: "p", value: p });
    }
    if !q.is_finite() || q < 0.0 {
        return Err(InitialError::BadRate { name: "q", value: q });
    }
    let d = dim as f64;
    Ok(InitialDerivatives {
        d1: p,
        d2: p * (q - p),
        d3: Some(p * (p * p - 4.0 * p * q + (d - 1.0) / d * q * q)),
    })
}

/// The dense-network limit of the torus third derivative,
/// `p (p^2 - 4 p q + q^2)`.
pub fn cartesian_d3_limit(p: f64, q: f64) -> f64 {
    p * (p * p - 4.0 * p * q + q * q)
}
