// SPDX-License-Identifier: MIT
//! Exact master-equation solvers.
//!
//! For a subset `S` of nodes, write `[S](t)` for the probability that every
//! node of `S` is still a nonadopter at time `t`. These survival
//! probabilities close into the triangular linear system
//!
//! ```text
//! d[S]/dt = -a(S) [S] + sum over l outside S of w(S, l) [S + l]
//! a(S)    = sum_{i in S} p_i + sum_{l not in S} w(S, l)
//! w(S, l) = sum_{i in S} q_{l,i}
//! ```
//!
//! with `[S](0) = 1`, and the adoption fraction is
//! `f(t) = 1 - mean over k of [{k}](t)`.
//!
//! [`solve_general_master`] integrates the full subset system for any
//! network, either analytically (exponential sums, exact coefficients) or
//! numerically. The circle solvers exploit the contiguous-run structure of
//! survival sets on circles to scale to hundreds of nodes, and
//! [`solve_block_and_alternating_circles`] evaluates the two canonical
//! infinite-circle arrangements compared in placement analysis.

mod blocks;
mod circle_one;
mod circle_two;
mod general;

pub use blocks::solve_block_and_alternating_circles;
pub use circle_one::solve_onesided_circle;
pub use circle_two::{convert_two_sided_to_one_sided, solve_twosided_circle};
pub use general::{
    solve_general_master, solve_general_master_auto, solve_general_master_numeric, MasterBackend,
    NumericTolerance, SubsetProbabilities, MAX_NODES_ANALYTIC, MAX_NODES_NUMERIC,
    MAX_NODES_TWO_SIDED,
};

use thiserror::Error;

/// Relative exponent gap below which analytic coefficients count as
/// degenerate and the solver falls back to numeric integration.
pub(crate) const DEGENERATE_REL_TOL: f64 = 1.0e-9;
/// Coefficient magnitude above which analytic evaluation refuses to
/// continue: beyond it, cancellation eats the accuracy advantage.
pub(crate) const COEFF_GUARD: f64 = 1.0e6;

/// Smallest rotation period shared by all the given per-node rate arrays:
/// nodes whose indices differ by the period see identical parameter
/// environments, so circle solvers need one representative per class.
pub(crate) fn rotation_period(arrays: &[&[f64]]) -> usize {
    let m = arrays[0].len();
    (1..=m)
        .filter(|d| m % d == 0)
        .find(|&d| {
            arrays.iter().all(|arr| {
                (0..m).all(|x| arr[x].to_bits() == arr[(x + d) % m].to_bits())
            })
        })
        .unwrap_or(m)
}

/// Errors raised by the master-equation solvers.
#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    /// The network exceeds the selected backend's node cap.
    #[error("network has {m} nodes, above the {backend} cap of {cap}")]
    TooManyNodes {
        m: usize,
        cap: usize,
        backend: &'static str,
    },
    /// Two exponents nearly coincide, so the analytic coefficients are
    /// ill-conditioned; use the numeric backend instead.
    #[error("near-degenerate exponents (gap {gap:e} at scale {scale:e}); use the numeric backend")]
    DegenerateExponents { gap: f64, scale: f64 },
    /// A coefficient grew past the cancellation guard; use the numeric
    /// backend instead.
    #[error("analytic coefficient reached {seen:e}, above the {limit:e} cancellation guard; use the numeric backend")]
    CoefficientOverflow { seen: f64, limit: f64 },
    /// The solver needs a different network structure.
    #[error("solver needs a {expected} network, got {got}")]
    WrongStructure { expected: &'static str, got: String },
    /// The adaptive integrator failed.
    #[error("adaptive integration failed: {0}")]
    Integration(String),
    /// A rate parameter violated its sign constraint.
    #[error("rate {name} = {value} must be finite and positive")]
    NonpositiveRate { name: &'static str, value: f64 },
}
