// SPDX-License-Identifier: MIT
//! Time grids shared by solvers, simulators, and comparison routines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing a [`TimeGrid`].
#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    /// Grids need at least two points so a curve has an interior.
    #[error("a time grid needs at least two points, got {0}")]
    TooShort(usize),
    /// Curves are anchored at the start of the process.
    #[error("a time grid must start at 0, got first point {0}")]
    NonzeroStart(f64),
    /// Points must be finite and strictly increasing.
    #[error("time grid points must be finite and strictly increasing (offending index {0})")]
    NotIncreasing(usize),
    /// Uniform grids need a positive horizon.
    #[error("a uniform grid needs a positive finite horizon, got {0}")]
    BadHorizon(f64),
}

/// A strictly increasing grid of evaluation times starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid from explicit points. The points must start at exactly
    /// `0`, be finite, and strictly increase.
    pub fn from_points(points: Vec<f64>) -> Result<Self, GridError> {
        if points.len() < 2 {
            return Err(GridError::TooShort(points.len()));
        }
        if points[0] != 0.0 {
            return Err(GridError::NonzeroStart(points[0]));
        }
        for i in 1..points.len() {
            if !points[i].is_finite() || points[i] <= points[i - 1] {
                return Err(GridError::NotIncreasing(i));
            }
        }
        Ok(Self { points })
    }

    /// Builds a uniform grid of `n_points` points over `[0, horizon]`,
    /// endpoints included.
    pub fn uniform(horizon: f64, n_points: usize) -> Result<Self, GridError> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(GridError::BadHorizon(horizon));
        }
        if n_points < 2 {
            return Err(GridError::TooShort(n_points));
        }
        let steps = (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points)
            .map(|i| horizon * (i as f64) / steps)
            .collect();
        points[0] = 0.0;
        points[n_points - 1] = horizon;
        Self::from_points(points)
    }

    /// The grid points.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: grids hold at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The final grid point.
    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grids hold at least two points")
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = GridError;

    fn try_from(points: Vec<f64>) -> Result<Self, GridError> {
        Self::from_points(points)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Vec<f64> {
        grid.points
    }
}
