// SPDX-License-Identifier: MIT
//! Analysis toolkit for the heterogeneous stochastic Bass diffusion model on
//! networks.
//!
//! A population of `m` nodes adopts an innovation irreversibly. While node `j`
//! is a nonadopter it adopts with hazard rate
//!
//! ```text
//! lambda_j(t) = p_j + sum over adopted k of q_{k,j}
//! ```
//!
//! where `p_j` is the node's individual (external) adoption rate and `q_{k,j}`
//! is the directed influence rate of node `k` on node `j`. The expected
//! adoption fraction `f(t)` is the central observable.
//!
//! The crate offers several independent routes to `f(t)` that cross-validate
//! each other:
//!
//! - [`network`]: construction and validation of influence networks
//!   (heterogeneous complete graphs, one- and two-sided circles, Cartesian
//!   tori, custom edge lists).
//! - [`gillespie`]: exact event-driven stochastic simulation and
//!   deterministic, parallel Monte Carlo estimation.
//! - [`master`]: exact master-equation solvers over nonadopter subsets, with
//!   an analytic exponential-sum backend, an adaptive numeric backend, and
//!   specialized circle solvers.
//! - [`closedform`]: closed-form adoption curves for canonical small systems
//!   and limits.
//! - [`initial`]: exact initial derivatives of `f` and their heterogeneity
//!   corrections.
//! - [`dominance`]: inter-adoption-time distributions and dominance
//!   comparisons between networks and curves.

pub mod closedform;
pub mod curve;
pub mod dominance;
pub mod gillespie;
pub mod grid;
pub mod initial;
pub mod master;
pub mod network;

mod ode;
mod util;

pub use curve::{AdoptionCurve, CdfCurve, CdfProvenance, CurveError, SampleCount};
pub use grid::{GridError, TimeGrid};
pub use network::{MildHetSpec, Network, NetworkError, StructureTag};
