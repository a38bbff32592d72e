// SPDX-License-Identifier: MIT
//! Dominance orders and curve comparisons.
//!
//! Two networks on the same node set are parameter-ordered when every
//! individual rate and every influence rate compares the same way; the
//! coupled-chain argument then orders the adoption curves pointwise.
//! Curve-level comparisons classify where one curve family lies relative to
//! another, with per-point statistical margins when either side is a Monte
//! Carlo estimate.

use crate::closedform::{interadoption_cdf_hom_complete, ClosedFormError};
use crate::curve::{AdoptionCurve, CdfCurve, CdfProvenance};
use crate::grid::TimeGrid;
use crate::network::Network;
use thiserror::Error;

/// Node cap for [`bruteforce_interadoption_cdfs`]; the walk visits all
/// `2^m` adopter sets.
pub const MAX_NODES_BRUTE_FORCE: usize = 8;

/// Errors raised by the dominance analyses.
#[derive(Debug, Error, PartialEq)]
pub enum DominanceError {
    /// The networks being compared have different node counts.
    #[error("networks have {left} and {right} nodes; comparison needs equal counts")]
    NodeCountMismatch { left: usize, right: usize },
    /// The curves being compared live on different grids.
    #[error("curves are on different grids")]
    GridMismatch,
    /// The gap-curve families being compared have different lengths.
    #[error("gap-curve families have {left} and {right} members; comparison needs equal counts")]
    CurveCountMismatch { left: usize, right: usize },
    /// The network exceeds the brute-force node cap.
    #[error("network has {m} nodes, above the brute-force cap of {cap}")]
    TooManyNodes { m: usize, cap: usize },
    /// A closed form rejected the parameters.
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// Outcome of an exact elementwise parameter comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceOrder {
    /// All rates equal.
    Equal,
    /// Every rate of the first network is at most the second's, at least
    /// one strictly below.
    FirstBelow,
    /// Every rate of the second network is at most the first's, at least
    /// one strictly below.
    SecondBelow,
    /// Strict violations in both directions.
    Incomparable,
}

/// A grid interval on which two curves change order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingInterval {
    /// Which curve of the family flips: `0` for a single adoption-curve
    /// comparison, the 1-based gap index for CDF families.
    pub curve: usize,
    /// Last grid point with the earlier strict order.
    pub lower: f64,
    /// First grid point with the opposite strict order.
    pub upper: f64,
}

/// How one curve family lies relative to another, up to the margins.
#[derive(Debug, Clone, PartialEq)]
pub enum DominanceRelation {
    /// Nowhere a strict difference.
    Equal,
    /// The first family lies below wherever the difference is strict.
    FirstBelow,
    /// The second family lies below wherever the difference is strict.
    SecondBelow,
    /// Strict differences in both directions; the intervals bracket the
    /// within-curve order flips (empty when the directions only disagree
    /// across different family members).
    Crossing(Vec<CrossingInterval>),
}

/// Result of a curve comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceVerdict {
    /// The classified relation.
    pub relation: DominanceRelation,
    /// Deterministic part of the per-point margin that was applied.
    pub tol: f64,
}

/// Compares two networks' rates elementwise: every individual rate `p_j`
/// and every ordered-pair influence rate.
pub fn parameter_order(a: &Network, b: &Network) -> Result<DominanceOrder, DominanceError> {
    if a.m() != b.m() {
        return Err(DominanceError::NodeCountMismatch {
            left: a.m(),
            right: b.m(),
        });
    }
    let mut first_strictly_less = false;
    let mut second_strictly_less = false;
    let mut note = |x: f64, y: f64| {
        if x < y {
            first_strictly_less = true;
        } else if y < x {
            second_strictly_less = true;
        }
    };
    for (&pa, &pb) in a.p().iter().zip(b.p()) {
        note(pa, pb);
    }
    for j in 0..a.m() {
        let mut left = a.in_edges(j).iter().peekable();
        let mut right = b.in_edges(j).iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(&&(_, ra)), None) => {
                    note(ra, 0.0);
                    left.next();
                }
                (None, Some(&&(_, rb))) => {
                    note(0.0, rb);
                    right.next();
                }
                (Some(&&(fa, ra)), Some(&&(fb, rb))) => {
                    if fa == fb {
                        note(ra, rb);
                        left.next();
                        right.next();
                    } else if fa < fb {
                        note(ra, 0.0);
                        left.next();
                    } else {
                        note(0.0, rb);
                        right.next();
                    }
                }
            }
        }
    }
    Ok(match (first_strictly_less, second_strictly_less) {
        (false, false) => DominanceOrder::Equal,
        (true, false) => DominanceOrder::FirstBelow,
        (false, true) => DominanceOrder::SecondBelow,
        (true, true) => DominanceOrder::Incomparable,
    })
}

/// Classifies each grid point's difference and records within-curve order
/// flips.
fn scan_differences(
    xs: &[f64],
    a: &[f64],
    b: &[f64],
    margins: &[f64],
    curve: usize,
    first_below: &mut bool,
    second_below: &mut bool,
    intervals: &mut Vec<CrossingInterval>,
) {
    let mut last_strict: Option<(usize, i8)> = None;
    for (i, ((&va, &vb), &margin)) in a.iter().zip(b).zip(margins).enumerate() {
        let diff = va - vb;
        let sign: i8 = if diff > margin {
            1
        } else if diff < -margin {
            -1
        } else {
            0
        };
        if sign == 0 {
            continue;
        }
        if sign > 0 {
            *second_below = true;
        } else {
            *first_below = true;
        }
        if let Some((j, s)) = last_strict {
            if s != sign {
                intervals.push(CrossingInterval {
                    curve,
                    lower: xs[j],
                    upper: xs[i],
                });
            }
        }
        last_strict = Some((i, sign));
    }
}

fn verdict(
    first_below: bool,
    second_below: bool,
    intervals: Vec<CrossingInterval>,
    tol: f64,
) -> DominanceVerdict {
    let relation = match (first_below, second_below) {
        (false, false) => DominanceRelation::Equal,
        (true, false) => DominanceRelation::FirstBelow,
        (false, true) => DominanceRelation::SecondBelow,
        (true, true) => DominanceRelation::Crossing(intervals),
    };
    DominanceVerdict { relation, tol }
}

/// Per-point margin: the deterministic tolerance, widened to three combined
/// standard errors wherever either curve is statistical.
fn margins(tol: f64, se_a: &[f64], se_b: &[f64]) -> Vec<f64> {
    se_a.iter()
        .zip(se_b)
        .map(|(&sa, &sb)| tol.max(3.0 * sa.hypot(sb)))
        .collect()
}

/// Compares two adoption curves pointwise on their shared grid.
pub fn compare_adoption_curves(
    a: &AdoptionCurve,
    b: &AdoptionCurve,
    tol: f64,
) -> Result<DominanceVerdict, DominanceError> {
    if a.grid() != b.grid() {
        return Err(DominanceError::GridMismatch);
    }
    let margins = margins(tol, &a.standard_errors(), &b.standard_errors());
    let mut first_below = false;
    let mut second_below = false;
    let mut intervals = Vec::new();
    scan_differences(
        a.grid().points(),
        a.values(),
        b.values(),
        &margins,
        0,
        &mut first_below,
        &mut second_below,
        &mut intervals,
    );
    Ok(verdict(first_below, second_below, intervals, tol))
}

/// Compares two families of interadoption-gap CDFs, one curve per gap
/// index, pooling the direction over the whole family.
pub fn check_cdf_dominance(
    a: &[CdfCurve],
    b: &[CdfCurve],
    tol: f64,
) -> Result<DominanceVerdict, DominanceError> {
    if a.len() != b.len() {
        return Err(DominanceError::CurveCountMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut first_below = false;
    let mut second_below = false;
    let mut intervals = Vec::new();
    for (k, (ca, cb)) in a.iter().zip(b).enumerate() {
        if ca.tau_grid() != cb.tau_grid() {
            return Err(DominanceError::GridMismatch);
        }
        let margins = margins(tol, &ca.standard_errors(), &cb.standard_errors());
        scan_differences(
            ca.tau_grid().points(),
            ca.values(),
            cb.values(),
            &margins,
            k + 1,
            &mut first_below,
            &mut second_below,
            &mut intervals,
        );
    }
    Ok(verdict(first_below, second_below, intervals, tol))
}

/// Exact interadoption-gap CDFs of any network up to
/// [`MAX_NODES_BRUTE_FORCE`] nodes, by walking the embedded jump chain
/// over all adopter sets.
///
/// The holding time in an adopter set is exponential in the set's total
/// hazard and independent of which node adopts next, so the `k`-th gap is
/// a mixture of exponentials weighted by the visit probabilities of the
/// sets with `k - 1` adopters. Sets with zero total hazard absorb the
/// chain, leaving later gaps unclosed.
pub fn bruteforce_interadoption_cdfs(
    net: &Network,
    tau_grid: &TimeGrid,
) -> Result<Vec<CdfCurve>, DominanceError> {
    let m = net.m();
    if m > MAX_NODES_BRUTE_FORCE {
        return Err(DominanceError::TooManyNodes {
            m,
            cap: MAX_NODES_BRUTE_FORCE,
        });
    }
    let p = net.p();
    let size = 1usize << m;
    let hazard = |mask: u32, j: usize| -> f64 {
        p[j] + net
            .in_edges(j)
            .iter()
            .filter(|&&(from, _)| mask & (1 << from) != 0)
            .map(|&(_, rate)| rate)
            .sum::<f64>()
    };

    let mut order: Vec<u32> = (0..size as u32).collect();
    order.sort_by_key(|mask| mask.count_ones());

    let points = tau_grid.points();
    let mut visit = vec![0.0f64; size];
    visit[0] = 1.0;
    let mut values = vec![vec![0.0f64; points.len()]; m];
    for &mask in &order {
        let weight = visit[mask as usize];
        if weight == 0.0 || mask.count_ones() as usize == m {
            continue;
        }
        let rates: Vec<(usize, f64)> = (0..m)
            .filter(|&j| mask & (1 << j) == 0)
            .map(|j| (j, hazard(mask, j)))
            .collect();
        let total: f64 = rates.iter().map(|&(_, r)| r).sum();
        if total <= 0.0 {
            continue;
        }
        let gap_values = &mut values[mask.count_ones() as usize];
        for (value, &tau) in gap_values.iter_mut().zip(points) {
            *value += weight * (-(-total * tau).exp_m1());
        }
        for &(j, rate) in &rates {
            visit[(mask | (1 << j)) as usize] += weight * rate / total;
        }
    }

    Ok(values
        .into_iter()
        .map(|v| CdfCurve::new(tau_grid.clone(), v, CdfProvenance::BruteForce))
        .collect())
}

/// Interadoption-gap CDFs of the homogeneous complete network from the
/// per-gap exponential closed form.
pub fn analytic_hom_complete_cdfs(
    m: usize,
    p: f64,
    q: f64,
    tau_grid: &TimeGrid,
) -> Result<Vec<CdfCurve>, DominanceError> {
    (1..=m)
        .map(|k| {
            let values = tau_grid
                .points()
                .iter()
                .map(|&tau| interadoption_cdf_hom_complete(m, p, q, k, tau))
                .collect::<Result<Vec<f64>, ClosedFormError>>()?;
            Ok(CdfCurve::new(
                tau_grid.clone(),
                values,
                CdfProvenance::Analytic,
            ))
        })
        .collect()
}
