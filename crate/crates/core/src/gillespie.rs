// SPDX-License-Identifier: MIT
//! Exact event-driven stochastic simulation.
//!
//! Adoption is a continuous-time Markov chain: nonadopter `j` adopts at
//! hazard `lambda_j = p_j` plus the influence rates of its adopted
//! in-neighbors. Each event consumes exactly two uniform draws, one for the
//! waiting time and one for the adopter, so runs with a common seed stay
//! aligned event-for-event across small parameter changes.
//!
//! Realization `index` of a batch draws from a ChaCha stream derived from
//! `(seed, index)`; [`simulate_realization`] is stream `0`. Batch estimates
//! accumulate fixed-size realization blocks that are merged in block order,
//! so results are bitwise reproducible regardless of thread count.

use crate::curve::{AdoptionCurve, CdfCurve, CdfProvenance};
use crate::grid::TimeGrid;
use crate::network::{Network, StructureTag};
use crate::util::kahan_sum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Realizations per accumulation block.
const BLOCK: u64 = 64;
/// Events between exact refreshes of the incrementally maintained totals.
const REFRESH_INTERVAL: u32 = 64;

/// One simulated diffusion history.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationRecord {
    /// Adoption times, strictly increasing.
    pub times: Vec<f64>,
    /// Node adopting at each time.
    pub adopters: Vec<usize>,
    /// True when the run stopped before full adoption, either at the time
    /// horizon or because every remaining hazard was zero.
    pub truncated: bool,
}

impl RealizationRecord {
    /// Number of adoptions at or before time `t`.
    pub fn adoption_count_by(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x <= t)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha stream for realization `index` of a batch seeded with `seed`.
fn realization_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut state = seed
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x243F_6A88_85A3_08D3);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(bytes)
}

/// Hazard bookkeeping feeding the shared event loop.
trait Hazard {
    fn total(&self) -> f64;
    /// Current hazard of node `j`, valid while `j` is a nonadopter.
    fn rate(&self, j: usize) -> f64;
    fn adopt(&mut self, j: usize, adopted: &[bool]);
    /// Recomputes the maintained totals exactly.
    fn refresh(&mut self, adopted: &[bool]);
}

/// Generic sparse path: per-node hazards updated along out-edges.
struct GenericHazard<'a> {
    net: &'a Network,
    lambda: Vec<f64>,
    total: f64,
}

impl<'a> GenericHazard<'a> {
    fn new(net: &'a Network) -> Self {
        let lambda = net.p().to_vec();
        let total = kahan_sum(lambda.iter().copied());
        Self { net, lambda, total }
    }
}

impl Hazard for GenericHazard<'_> {
    fn total(&self) -> f64 {
        self.total
    }

    fn rate(&self, j: usize) -> f64 {
        self.lambda[j]
    }

    fn adopt(&mut self, j: usize, adopted: &[bool]) {
        self.total -= self.lambda[j];
        self.lambda[j] = 0.0;
        for &(to, rate) in self.net.out_edges(j) {
            if !adopted[to] {
                self.lambda[to] += rate;
                self.total += rate;
            }
        }
    }

    fn refresh(&mut self, adopted: &[bool]) {
        self.total = kahan_sum(
            self.lambda
                .iter()
                .zip(adopted)
                .filter(|&(_, &a)| !a)
                .map(|(&l, _)| l),
        );
    }
}

/// Complete-graph path: with `w_j = q_j / (m - 1)` the hazard of a
/// nonadopter after `k` adoptions is `p_j + k w_j`, so the per-node array
/// and its total need no edge walks.
struct CompleteHazard<'a> {
    p: &'a [f64],
    w: Vec<f64>,
    adopted_count: f64,
    p_rest: f64,
    w_rest: f64,
}

impl<'a> CompleteHazard<'a> {
    fn new(net: &'a Network) -> Self {
        let m = net.m();
        let w: Vec<f64> = (0..m)
            .map(|j| net.in_influence(j) / (m - 1) as f64)
            .collect();
        Self {
            p: net.p(),
            p_rest: kahan_sum(net.p().iter().copied()),
            w_rest: kahan_sum(w.iter().copied()),
            w,
            adopted_count: 0.0,
        }
    }
}

impl Hazard for CompleteHazard<'_> {
    fn total(&self) -> f64 {
        self.p_rest + self.adopted_count * self.w_rest
    }

    fn rate(&self, j: usize) -> f64 {
        self.p[j] + self.adopted_count * self.w[j]
    }

    fn adopt(&mut self, j: usize, _adopted: &[bool]) {
        self.p_rest -= self.p[j];
        self.w_rest -= self.w[j];
        self.adopted_count += 1.0;
    }

    fn refresh(&mut self, adopted: &[bool]) {
        let rest = |values: &[f64]| {
            kahan_sum(
                values
                    .iter()
                    .zip(adopted)
                    .filter(|&(_, &a)| !a)
                    .map(|(&v, _)| v),
            )
        };
        self.p_rest = rest(self.p);
        self.w_rest = rest(&self.w);
    }
}

fn drive<H: Hazard>(
    mut hazard: H,
    m: usize,
    horizon: Option<f64>,
    rng: &mut ChaCha12Rng,
) -> RealizationRecord {
    let mut adopted = vec![false; m];
    let mut times = Vec::with_capacity(m);
    let mut adopters = Vec::with_capacity(m);
    let mut t = 0.0;
    let mut since_refresh = 0u32;

    while times.len() < m {
        let total = hazard.total();
        if total <= 0.0 {
            hazard.refresh(&adopted);
            if hazard.total() <= 0.0 {
                return RealizationRecord {
                    times,
                    adopters,
                    truncated: true,
                };
            }
            continue;
        }
        let u1: f64 = rng.random();
        t += -(1.0 - u1).ln() / total;
        if let Some(h) = horizon {
            if t > h {
                let truncated = times.len() < m;
                return RealizationRecord {
                    times,
                    adopters,
                    truncated,
                };
            }
        }
        let u2: f64 = rng.random();
        let target = u2 * total;
        let mut cum = 0.0;
        let mut chosen = None;
        let mut last_nonadopter = 0;
        for j in 0..m {
            if adopted[j] {
                continue;
            }
            last_nonadopter = j;
            cum += hazard.rate(j);
            if cum > target {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.unwrap_or(last_nonadopter);
        adopted[j] = true;
        times.push(t);
        adopters.push(j);
        hazard.adopt(j, &adopted);
        since_refresh += 1;
        if since_refresh == REFRESH_INTERVAL {
            hazard.refresh(&adopted);
            since_refresh = 0;
        }
    }
    RealizationRecord {
        times,
        adopters,
        truncated: false,
    }
}

/// Simulates realization `index` of the batch seeded with `seed`, stopping
/// at `horizon` when one is given.
pub fn simulate_realization_indexed(
    net: &Network,
    horizon: Option<f64>,
    seed: u64,
    index: u64,
) -> RealizationRecord {
    let mut rng = realization_rng(seed, index);
    let m = net.m();
    match net.structure() {
        StructureTag::Complete => drive(CompleteHazard::new(net), m, horizon, &mut rng),
        _ => drive(GenericHazard::new(net), m, horizon, &mut rng),
    }
}

/// Simulates a single diffusion history (stream `0` of `seed`).
pub fn simulate_realization(
    net: &Network,
    horizon: Option<f64>,
    seed: u64,
) -> RealizationRecord {
    simulate_realization_indexed(net, horizon, seed, 0)
}

/// Estimates the expected adoption curve from `n_realizations` independent
/// histories, with pointwise 95% confidence half-widths for two or more.
///
/// Bitwise reproducible for a given `(net, grid, n_realizations, seed)`
/// regardless of thread count.
pub fn estimate_adoption_curve(
    net: &Network,
    grid: &TimeGrid,
    n_realizations: u64,
    seed: u64,
) -> AdoptionCurve {
    assert!(n_realizations > 0, "need at least one realization");
    let n_points = grid.len();
    let m = net.m() as f64;
    let horizon = Some(grid.horizon());
    let n_blocks = n_realizations.div_ceil(BLOCK);

    let per_block: Vec<(Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut sum = vec![0.0; n_points];
            let mut sum_sq = vec![0.0; n_points];
            let lo = block * BLOCK;
            let hi = (lo + BLOCK).min(n_realizations);
            for index in lo..hi {
                let record = simulate_realization_indexed(net, horizon, seed, index);
                let mut next_event = 0;
                for (i, &t) in grid.points().iter().enumerate() {
                    while next_event < record.times.len() && record.times[next_event] <= t {
                        next_event += 1;
                    }
                    let fraction = next_event as f64 / m;
                    sum[i] += fraction;
                    sum_sq[i] += fraction * fraction;
                }
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = vec![0.0; n_points];
    let mut sum_sq = vec![0.0; n_points];
    for (block_sum, block_sq) in &per_block {
        for i in 0..n_points {
            sum[i] += block_sum[i];
            sum_sq[i] += block_sq[i];
        }
    }

    let n = n_realizations as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let ci = if n_realizations >= 2 {
        Some(
            sum.iter()
                .zip(&sum_sq)
                .map(|(&s, &sq)| {
                    let var = ((sq - s * s / n) / (n - 1.0)).max(0.0);
                    1.96 * (var / n).sqrt()
                })
                .collect(),
        )
    } else {
        None
    };
    AdoptionCurve::monte_carlo(grid.clone(), values, ci, n_realizations)
}

/// Empirical interadoption-gap distributions of a batch of realizations.
#[derive(Debug, Clone)]
pub struct EmpiricalCdfSet {
    curves: Vec<CdfCurve>,
    reached: Vec<u64>,
    realizations: u64,
}

impl EmpiricalCdfSet {
    /// CDF of the gap before the `k`-th adoption (1-based), unconditional:
    /// realizations with fewer than `k` adoptions count as never closing
    /// the gap.
    pub fn curve(&self, k: usize) -> Option<&CdfCurve> {
        (1..=self.curves.len())
            .contains(&k)
            .then(|| &self.curves[k - 1])
    }

    /// All gap CDFs, `k = 1..=m`.
    pub fn curves(&self) -> &[CdfCurve] {
        &self.curves
    }

    /// Number of realizations reaching at least `k` adoptions.
    pub fn reached(&self, k: usize) -> u64 {
        if (1..=self.reached.len()).contains(&k) {
            self.reached[k - 1]
        } else {
            0
        }
    }

    /// Batch size.
    pub fn realizations(&self) -> u64 {
        self.realizations
    }
}

/// Estimates the interadoption-gap CDFs `F_k(tau)` for `k = 1..=m` from
/// `n_realizations` histories run to absorption (no horizon).
///
/// `F_k(tau)` is the unconditional probability that the gap between the
/// `(k-1)`-th and `k`-th adoption is at most `tau`; realizations that stop
/// short of `k` adoptions (possible only with zero-hazard pockets) never
/// close the gap.
pub fn estimate_interadoption_cdfs(
    net: &Network,
    tau_grid: &TimeGrid,
    n_realizations: u64,
    seed: u64,
) -> EmpiricalCdfSet {
    assert!(n_realizations > 0, "need at least one realization");
    let m = net.m();
    let points = tau_grid.points();
    let n_points = points.len();
    let n_blocks = n_realizations.div_ceil(BLOCK);

    let per_block: Vec<(Vec<u64>, Vec<u64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut hist = vec![0u64; m * n_points];
            let mut reached = vec![0u64; m];
            let lo = block * BLOCK;
            let hi = (lo + BLOCK).min(n_realizations);
            for index in lo..hi {
                let record = simulate_realization_indexed(net, None, seed, index);
                let mut previous = 0.0;
                for (event, &t) in record.times.iter().enumerate() {
                    reached[event] += 1;
                    let gap = t - previous;
                    previous = t;
                    let pos = points.partition_point(|&tau| tau < gap);
                    if pos < n_points {
                        hist[event * n_points + pos] += 1;
                    }
                }
            }
            (hist, reached)
        })
        .collect();

    let mut hist = vec![0u64; m * n_points];
    let mut reached = vec![0u64; m];
    for (block_hist, block_reached) in &per_block {
        for (total, &h) in hist.iter_mut().zip(block_hist) {
            *total += h;
        }
        for (total, &r) in reached.iter_mut().zip(block_reached) {
            *total += r;
        }
    }

    let n = n_realizations as f64;
    let curves = (0..m)
        .map(|event| {
            let row = &hist[event * n_points..(event + 1) * n_points];
            let mut running = 0u64;
            let values = row
                .iter()
                .map(|&h| {
                    running += h;
                    running as f64 / n
                })
                .collect();
            CdfCurve::new(
                tau_grid.clone(),
                values,
                CdfProvenance::Empirical(n_realizations),
            )
        })
        .collect();
    EmpiricalCdfSet {
        curves,
        reached,
        realizations: n_realizations,
    }
}
