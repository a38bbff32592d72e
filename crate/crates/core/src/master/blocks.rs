// SPDX-License-Identifier: MIT
//! Adoption curves for the two infinite-circle block placements of a
//! two-level external-influence profile.

use super::SolverError;
use crate::closedform::f_1d;
use crate::curve::AdoptionCurve;
use crate::grid::TimeGrid;
use crate::ode::{integrate_to_grid, Rk45Options};

/// Adoption curves for two placements of external-influence rates `p1` and
/// `p2` (half the nodes each) on an infinite one-sided circle with
/// homogeneous internal rate `q`: contiguous blocks of like nodes versus a
/// strictly alternating arrangement.
///
/// Returns `(blocks, alternating)`. In the block placement almost every
/// node sits deep inside a run of its own kind, so each half follows the
/// homogeneous one-sided-circle curve for its own `p`. In the alternating
/// placement every node's chain of predecessors alternates rates, which
/// couples the two survival profiles through a linear two-function system.
pub fn solve_block_and_alternating_circles(
    grid: &TimeGrid,
    p1: f64,
    p2: f64,
    q: f64,
) -> Result<(AdoptionCurve, AdoptionCurve), SolverError> {
    for (name, value) in [("p1", p1), ("p2", p2), ("q", q)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(SolverError::NonpositiveRate {
                name,
                value,
            });
        }
    }

    let points = grid.points();
    let half = |t: f64, p: f64| f_1d(t, p, q).expect("rates validated above");
    let blocks_values: Vec<f64> = points
        .iter()
        .map(|&t| 0.5 * (half(t, p1) + half(t, p2)))
        .collect();
    let blocks = AdoptionCurve::exact(grid.clone(), blocks_values);

    // Rescaled segment survivals along the alternating predecessor chain:
    // U belongs to nodes of rate p1 (next predecessor has rate p2) and V to
    // nodes of rate p2, coupled through the predecessor's external factor.
    let deriv = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = q * (-p2 * t).exp() * y[1];
        dy[1] = q * (-p1 * t).exp() * y[0];
    };
    let opts = Rk45Options {
        atol: 1.0e-10,
        rtol: 1.0e-10,
        ..Rk45Options::default()
    };
    let rows = integrate_to_grid(deriv, vec![1.0, 1.0], points, &opts)
        .map_err(|e| SolverError::Integration(e.to_string()))?;

    let alternating_values: Vec<f64> = points
        .iter()
        .zip(&rows)
        .map(|(&t, row)| {
            let u = row[0];
            let v = row[1];
            1.0 - 0.5 * (-q * t).exp() * ((-p1 * t).exp() * u + (-p2 * t).exp() * v)
        })
        .collect();
    let alternating = AdoptionCurve::exact(grid.clone(), alternating_values);

    Ok((blocks, alternating))
}
