// SPDX-License-Identifier: MIT
//! General subset master-equation solver for arbitrary networks.

use super::{SolverError, COEFF_GUARD, DEGENERATE_REL_TOL};
use crate::curve::AdoptionCurve;
use crate::grid::TimeGrid;
use crate::network::Network;
use crate::ode::{integrate_to_grid, Rk45Options};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Node cap for the analytic backend; the exponential-sum table holds up to
/// `3^m` terms.
pub const MAX_NODES_ANALYTIC: usize = 12;
/// Node cap for the numeric backend; the state vector holds `2^m` entries.
pub const MAX_NODES_NUMERIC: usize = 16;
/// Node cap for the two-sided circle solver.
pub const MAX_NODES_TWO_SIDED: usize = 100;

/// Backend selection for [`solve_general_master`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MasterBackend {
    /// Exact exponential sums with coefficients merged by generating subset.
    Analytic,
    /// Adaptive Runge-Kutta integration of the subset system.
    Numeric,
}

/// Subset survival probabilities `[S](t)` on the evaluation grid, keyed by
/// bitmask (bit `i` set means node `i` belongs to `S`).
///
/// For networks up to [`MAX_NODES_ANALYTIC`] nodes every nonempty subset is
/// stored; above that only the singletons and the full set are kept to bound
/// memory, and [`Self::prob`] returns `None` for the rest.
#[derive(Debug, Clone)]
pub struct SubsetProbabilities {
    m: usize,
    grid: TimeGrid,
    table: Vec<Option<Vec<f64>>>,
}

impl SubsetProbabilities {
    /// Number of nodes.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The evaluation grid.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Survival trajectory of the subset with this bitmask, if stored.
    pub fn prob(&self, mask: u32) -> Option<&[f64]> {
        self.table.get(mask as usize).and_then(|t| t.as_deref())
    }

    /// Survival trajectory of node `k` alone.
    pub fn singleton(&self, k: usize) -> &[f64] {
        self.prob(1 << k).expect("singletons are always stored")
    }

    /// Survival trajectory of the full node set.
    pub fn full_set(&self) -> &[f64] {
        self.prob(((1u64 << self.m) - 1) as u32)
            .expect("the full set is always stored")
    }

    /// Masks with stored trajectories, ascending.
    pub fn stored_masks(&self) -> Vec<u32> {
        (1..self.table.len() as u32)
            .filter(|&mask| self.table[mask as usize].is_some())
            .collect()
    }
}

/// Precomputed per-subset outflow rates `a(S)` and couplings `w(S, l)`
/// toward each superset `S + l`.
struct SubsetSystem {
    /// `a(S)` indexed by mask.
    rates: Vec<f64>,
    /// `(superset mask, w)` pairs per mask, ascending in superset mask.
    couplings: Vec<Vec<(u32, f64)>>,
}

impl SubsetSystem {
    fn build(net: &Network) -> Self {
        let m = net.m();
        let size = 1usize << m;
        let p = net.p();
        let mut rates = vec![0.0; size];
        let mut couplings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); size];
        for mask in 1..size {
            let mask32 = mask as u32;
            let mut outflow: f64 = (0..m)
                .filter(|&i| mask32 & (1 << i) != 0)
                .map(|i| p[i])
                .sum();
            let mut pairs = Vec::new();
            for l in 0..m {
                if mask32 & (1 << l) != 0 {
                    continue;
                }
                let w: f64 = net
                    .out_edges(l)
                    .iter()
                    .filter(|&&(to, _)| mask32 & (1 << to) != 0)
                    .map(|&(_, rate)| rate)
                    .sum();
                if w > 0.0 {
                    outflow += w;
                    pairs.push((mask32 | (1 << l), w));
                }
            }
            pairs.sort_unstable_by_key(|&(sup, _)| sup);
            rates[mask] = outflow;
            couplings[mask] = pairs;
        }
        Self { rates, couplings }
    }
}

fn check_cap(m: usize, cap: usize, backend: &'static str) -> Result<(), SolverError> {
    if m > cap {
        return Err(SolverError::TooManyNodes { m, cap, backend });
    }
    Ok(())
}

/// Solves the subset master equations for `net` on `grid`, returning the
/// adoption curve and the subset survival table.
///
/// The analytic backend handles up to [`MAX_NODES_ANALYTIC`] nodes and fails
/// with [`SolverError::DegenerateExponents`] or
/// [`SolverError::CoefficientOverflow`] when exponent collisions make exact
/// coefficients ill-conditioned; callers then fall back to the numeric
/// backend, which handles up to [`MAX_NODES_NUMERIC`] nodes.
pub fn solve_general_master(
    net: &Network,
    grid: &TimeGrid,
    backend: MasterBackend,
) -> Result<(AdoptionCurve, SubsetProbabilities), SolverError> {
    match backend {
        MasterBackend::Analytic => {
            check_cap(net.m(), MAX_NODES_ANALYTIC, "analytic backend")?;
            solve_analytic(net, grid)
        }
        MasterBackend::Numeric => {
            solve_general_master_numeric(net, grid, NumericTolerance::default())
        }
    }
}

/// Integration tolerances for the numeric backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericTolerance {
    /// Absolute per-step error tolerance.
    pub atol: f64,
    /// Relative per-step error tolerance.
    pub rtol: f64,
}

impl Default for NumericTolerance {
    fn default() -> Self {
        Self {
            atol: 1.0e-10,
            rtol: 1.0e-9,
        }
    }
}

impl NumericTolerance {
    /// Tightened tolerances for consumers that amplify trajectory noise,
    /// such as finite-difference derivative extraction dividing by `h^3`.
    pub fn strict() -> Self {
        Self {
            atol: 1.0e-13,
            rtol: 1.0e-12,
        }
    }
}

/// Like [`solve_general_master`] with [`MasterBackend::Numeric`], but with
/// caller-supplied integration tolerances.
pub fn solve_general_master_numeric(
    net: &Network,
    grid: &TimeGrid,
    tol: NumericTolerance,
) -> Result<(AdoptionCurve, SubsetProbabilities), SolverError> {
    check_cap(net.m(), MAX_NODES_NUMERIC, "numeric backend")?;
    solve_numeric(net, grid, tol)
}

/// Tries the analytic backend and falls back to the numeric one when the
/// analytic coefficients are ill-conditioned or the network exceeds the
/// analytic cap.
pub fn solve_general_master_auto(
    net: &Network,
    grid: &TimeGrid,
) -> Result<(AdoptionCurve, SubsetProbabilities), SolverError> {
    if net.m() <= MAX_NODES_ANALYTIC {
        match solve_general_master(net, grid, MasterBackend::Analytic) {
            Ok(result) => return Ok(result),
            Err(
                SolverError::DegenerateExponents { .. } | SolverError::CoefficientOverflow { .. },
            ) => {}
            Err(other) => return Err(other),
        }
    }
    solve_general_master(net, grid, MasterBackend::Numeric)
}

fn solve_analytic(
    net: &Network,
    grid: &TimeGrid,
) -> Result<(AdoptionCurve, SubsetProbabilities), SolverError> {
    let m = net.m();
    let size = 1usize << m;
    let full = size - 1;
    let system = SubsetSystem::build(net);

    // Subset masks in decreasing popcount order so supersets resolve first.
    let mut order: Vec<u32> = (1..size as u32).collect();
    order.sort_unstable_by_key(|mask| std::cmp::Reverse(mask.count_ones()));

    // Each subset's solution is a sum of terms c * exp(-rates[g] * t) where
    // g is the subset whose outflow rate generated the exponent. Keying
    // terms by g merges coefficients exactly along the lattice.
    let mut terms: Vec<Vec<(u32, f64)>> = vec![Vec::new(); size];
    terms[full] = vec![(full as u32, 1.0)];

    for &mask in &order {
        if mask as usize == full {
            continue;
        }
        let a = system.rates[mask as usize];
        let mut forcing: BTreeMap<u32, f64> = BTreeMap::new();
        for &(sup, w) in &system.couplings[mask as usize] {
            for &(gen_mask, coeff) in &terms[sup as usize] {
                *forcing.entry(gen_mask).or_insert(0.0) += w * coeff;
            }
        }
        let mut own = Vec::with_capacity(forcing.len() + 1);
        let mut at_own_rate = 1.0;
        own.push((mask, 0.0));
        for (&gen_mask, &c) in &forcing {
            let b = system.rates[gen_mask as usize];
            let gap = a - b;
            let scale = a.abs().max(b.abs());
            if gap.abs() <= DEGENERATE_REL_TOL * scale {
                return Err(SolverError::DegenerateExponents {
                    gap: gap.abs(),
                    scale,
                });
            }
            let coeff = c / gap;
            if coeff.abs() > COEFF_GUARD {
                return Err(SolverError::CoefficientOverflow {
                    seen: coeff.abs(),
                    limit: COEFF_GUARD,
                });
            }
            at_own_rate -= coeff;
            own.push((gen_mask, coeff));
        }
        if at_own_rate.abs() > COEFF_GUARD {
            return Err(SolverError::CoefficientOverflow {
                seen: at_own_rate.abs(),
                limit: COEFF_GUARD,
            });
        }
        own[0].1 = at_own_rate;
        terms[mask as usize] = own;
    }

    // Shared exponential table: exp(-a(g) * t) for every mask and grid
    // point, so evaluation is one multiply-add per term per point.
    let points = grid.points();
    let n_points = points.len();
    let exp_rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|mask| {
            let rate = system.rates[mask];
            points.iter().map(|&t| (-rate * t).exp()).collect()
        })
        .collect();

    let table: Vec<Option<Vec<f64>>> = (0..size)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                return None;
            }
            let mut row = vec![0.0; n_points];
            for &(gen_mask, coeff) in &terms[mask] {
                let exps = &exp_rows[gen_mask as usize];
                for (value, e) in row.iter_mut().zip(exps) {
                    *value += coeff * e;
                }
            }
            Some(row)
        })
        .collect();

    let probs = SubsetProbabilities {
        m,
        grid: grid.clone(),
        table,
    };
    let curve = curve_from_singletons(m, grid, &probs);
    Ok((curve, probs))
}

fn solve_numeric(
    net: &Network,
    grid: &TimeGrid,
    tol: NumericTolerance,
) -> Result<(AdoptionCurve, SubsetProbabilities), SolverError> {
    let m = net.m();
    let size = 1usize << m;
    let system = SubsetSystem::build(net);

    let deriv = |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = 0.0;
        for mask in 1..size {
            let mut rhs = -system.rates[mask] * y[mask];
            for &(sup, w) in &system.couplings[mask] {
                rhs += w * y[sup as usize];
            }
            dy[mask] = rhs;
        }
    };

    let y0 = vec![1.0; size];
    let opts = Rk45Options {
        atol: tol.atol,
        rtol: tol.rtol,
        ..Rk45Options::default()
    };
    let rows = integrate_to_grid(deriv, y0, grid.points(), &opts)
        .map_err(|e| SolverError::Integration(e.to_string()))?;

    let keep_all = m <= MAX_NODES_ANALYTIC;
    let full = size - 1;
    let mut table: Vec<Option<Vec<f64>>> = vec![None; size];
    for mask in 1..size {
        let keep = keep_all || mask == full || (mask as u32).count_ones() == 1;
        if keep {
            table[mask] = Some(rows.iter().map(|row| row[mask]).collect());
        }
    }

    let probs = SubsetProbabilities {
        m,
        grid: grid.clone(),
        table,
    };
    let curve = curve_from_singletons(m, grid, &probs);
    Ok((curve, probs))
}

fn curve_from_singletons(m: usize, grid: &TimeGrid, probs: &SubsetProbabilities) -> AdoptionCurve {
    let mut values = vec![0.0; grid.len()];
    for k in 0..m {
        let traj = probs.singleton(k);
        for (v, s) in values.iter_mut().zip(traj) {
            *v += s;
        }
    }
    for v in &mut values {
        *v = 1.0 - *v / m as f64;
    }
    AdoptionCurve::exact(grid.clone(), values)
}
