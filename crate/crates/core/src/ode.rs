// SPDX-License-Identifier: MIT
//! Adaptive Dormand-Prince 5(4) integration onto explicit time grids.
//!
//! The integrator steps exactly onto every requested grid point, so emitted
//! values carry full integration accuracy rather than dense-output
//! interpolation error. All systems in this crate are mildly sized linear
//! ones, well within explicit Runge-Kutta territory.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub(crate) enum OdeError {
    #[error("step size underflowed at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("exceeded {0} integration steps")]
    MaxStepsExceeded(usize),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Rk45Options {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            atol: 1.0e-10,
            rtol: 1.0e-9,
            max_steps: 10_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19_372.0 / 6_561.0;
const A52: f64 = -25_360.0 / 2_187.0;
const A53: f64 = 64_448.0 / 6_561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9_017.0 / 3_168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46_732.0 / 5_247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5_103.0 / 18_656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1_113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2_187.0 / 6_784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const E1: f64 = 71.0 / 57_600.0;
const E3: f64 = -71.0 / 16_695.0;
const E4: f64 = 71.0 / 1_920.0;
const E5: f64 = -17_253.0 / 339_200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = deriv(t, y)` from `grid[0]` through `grid.last()`,
/// returning the state at every grid point. `grid` must be strictly
/// increasing and `y0` is the state at `grid[0]`.
pub(crate) fn integrate_to_grid<F>(
    mut deriv: F,
    y0: Vec<f64>,
    grid: &[f64],
    opts: &Rk45Options,
) -> Result<Vec<Vec<f64>>, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.clone());
    if grid.len() == 1 {
        return Ok(out);
    }

    let span = grid[grid.len() - 1] - grid[0];
    let h_min = span * 1.0e-14;

    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];
    let mut y_next = vec![0.0; dim];
    deriv(t, &y, &mut k1);

    let mut h = initial_step(&mut deriv, t, &y, &k1, span, opts, &mut stage, &mut k7);

    let mut steps = 0usize;
    for &target in &grid[1..] {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(OdeError::MaxStepsExceeded(opts.max_steps));
            }
            let remaining = target - t;
            let h_try = if remaining <= h_min {
                remaining
            } else {
                h.min(remaining)
            };

            for i in 0..dim {
                stage[i] = y[i] + h_try * A21 * k1[i];
            }
            deriv(t + C2 * h_try, &stage, &mut k2);
            for i in 0..dim {
                stage[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i]);
            }
            deriv(t + C3 * h_try, &stage, &mut k3);
            for i in 0..dim {
                stage[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            deriv(t + C4 * h_try, &stage, &mut k4);
            for i in 0..dim {
                stage[i] =
                    y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            deriv(t + C5 * h_try, &stage, &mut k5);
            for i in 0..dim {
                stage[i] = y[i]
                    + h_try
                        * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            deriv(t + h_try, &stage, &mut k6);
            for i in 0..dim {
                y_next[i] = y[i]
                    + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            deriv(t + h_try, &y_next, &mut k7);

            let mut err_sq = 0.0;
            for i in 0..dim {
                let err_i = h_try
                    * (E1 * k1[i]
                        + E3 * k3[i]
                        + E4 * k4[i]
                        + E5 * k5[i]
                        + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_next[i].abs());
                err_sq += (err_i / scale) * (err_i / scale);
            }
            let err = (err_sq / dim as f64).sqrt();

            if err <= 1.0 {
                t += h_try;
                std::mem::swap(&mut y, &mut y_next);
                std::mem::swap(&mut k1, &mut k7);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h_try * factor).min(span);
            } else {
                let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                h = h_try * factor;
                if h < h_min {
                    return Err(OdeError::StepSizeUnderflow { t });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Conservative first-step heuristic based on the scale of the state and its
/// derivative.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    deriv: &mut F,
    t0: f64,
    y0: &[f64],
    k1: &[f64],
    span: f64,
    opts: &Rk45Options,
    stage: &mut [f64],
    k_probe: &mut [f64],
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len() as f64;
    let norm = |v: &[f64], reference: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..v.len() {
            let scale = opts.atol + opts.rtol * reference[i].abs();
            s += (v[i] / scale) * (v[i] / scale);
        }
        (s / dim).sqrt()
    };
    let d0 = norm(y0, y0);
    let d1 = norm(k1, y0);
    let h0 = if d0 < 1.0e-5 || d1 < 1.0e-5 {
        1.0e-6 * span
    } else {
        0.01 * d0 / d1
    };

    for i in 0..y0.len() {
        stage[i] = y0[i] + h0 * k1[i];
    }
    deriv(t0 + h0, stage, k_probe);
    let mut d2_sq = 0.0;
    for i in 0..y0.len() {
        let scale = opts.atol + opts.rtol * y0[i].abs();
        let diff = (k_probe[i] - k1[i]) / scale;
        d2_sq += diff * diff;
    }
    let d2 = (d2_sq / dim).sqrt() / h0;

    let h1 = if d1.max(d2) <= 1.0e-15 {
        (h0 * 1.0e-3).max(1.0e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
