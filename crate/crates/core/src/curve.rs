// SPDX-License-Identifier: MIT
//! Adoption curves and inter-adoption-time CDF curves.

use crate::grid::TimeGrid;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when combining curves.
#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    /// The two curves were sampled on different grids.
    #[error("curves are sampled on different time grids")]
    GridMismatch,
}

/// How many stochastic samples back a curve, or whether it is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleCount {
    /// The curve comes from an exact solver or closed form.
    Exact,
    /// The curve is a Monte Carlo average over this many realizations.
    Realizations(u64),
}

/// The expected adoption fraction `f(t)` sampled on a [`TimeGrid`].
///
/// Values start at `f(0) = 0`, are nondecreasing, and stay within `[0, 1]`,
/// all up to the producing solver's tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionCurve {
    grid: TimeGrid,
    values: Vec<f64>,
    ci_half_width: Option<Vec<f64>>,
    samples: SampleCount,
}

impl AdoptionCurve {
    /// Wraps values produced by an exact solver.
    ///
    /// Panics if `values` and `grid` lengths disagree; exact producers are
    /// internal and always sample the grid they were given.
    pub(crate) fn exact(grid: TimeGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        Self {
            grid,
            values,
            ci_half_width: None,
            samples: SampleCount::Exact,
        }
    }

    /// Wraps a Monte Carlo estimate together with pointwise 95% confidence
    /// half-widths (`1.96 * std / sqrt(n)`); the half-widths are omitted for
    /// a single realization, where the sample deviation is undefined.
    pub(crate) fn monte_carlo(
        grid: TimeGrid,
        values: Vec<f64>,
        ci_half_width: Option<Vec<f64>>,
        n_realizations: u64,
    ) -> Self {
        assert_eq!(grid.len(), values.len());
        if let Some(ci) = &ci_half_width {
            assert_eq!(grid.len(), ci.len());
        }
        Self {
            grid,
            values,
            ci_half_width,
            samples: SampleCount::Realizations(n_realizations),
        }
    }

    /// The evaluation grid.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// The adoption fractions, aligned with [`Self::grid`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise 95% confidence half-widths for Monte Carlo curves.
    pub fn ci_half_width(&self) -> Option<&[f64]> {
        self.ci_half_width.as_deref()
    }

    /// Sample count or exactness marker.
    pub fn samples(&self) -> SampleCount {
        self.samples
    }

    /// Pointwise standard errors derived from the confidence half-widths,
    /// zero for exact curves.
    pub(crate) fn standard_errors(&self) -> Vec<f64> {
        match &self.ci_half_width {
            Some(ci) => ci.iter().map(|c| c / 1.96).collect(),
            None => vec![0.0; self.values.len()],
        }
    }

    /// Largest absolute pointwise difference to another curve on the same
    /// grid.
    pub fn sup_distance(&self, other: &AdoptionCurve) -> Result<f64, CurveError> {
        if self.grid != other.grid {
            return Err(CurveError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Where a CDF curve comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfProvenance {
    /// Closed-form expression; valid only where the producing formula's
    /// independence assumptions hold.
    Analytic,
    /// Exact enumeration over adoption orders.
    BruteForce,
    /// Empirical CDF over this many simulated realizations.
    Empirical(u64),
}

/// The CDF `F_k(tau)` of one inter-adoption time `t_k`, sampled on a grid of
/// lags.
///
/// The CDF is unconditional: realizations in which the `k`-th adoption never
/// happens contribute mass at infinity, so `F_k` may saturate below one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCurve {
    tau_grid: TimeGrid,
    values: Vec<f64>,
    provenance: CdfProvenance,
}

impl CdfCurve {
    pub(crate) fn new(tau_grid: TimeGrid, values: Vec<f64>, provenance: CdfProvenance) -> Self {
        assert_eq!(tau_grid.len(), values.len());
        Self {
            tau_grid,
            values,
            provenance,
        }
    }

    /// The lag grid.
    pub fn tau_grid(&self) -> &TimeGrid {
        &self.tau_grid
    }

    /// CDF values aligned with [`Self::tau_grid`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Curve provenance.
    pub fn provenance(&self) -> CdfProvenance {
        self.provenance
    }

    /// Pointwise binomial standard errors; zero for exact curves.
    pub(crate) fn standard_errors(&self) -> Vec<f64> {
        match self.provenance {
            CdfProvenance::Empirical(n) if n > 0 => {
                let n = n as f64;
                self.values
                    .iter()
                    .map(|&v| {
                        let v = v.clamp(0.0, 1.0);
                        (v * (1.0 - v) / n).sqrt()
                    })
                    .collect()
            }
            _ => vec![0.0; self.values.len()],
        }
    }
}
