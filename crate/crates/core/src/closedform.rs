// SPDX-License-Identifier: MIT
//! Closed-form adoption curves for canonical systems.
//!
//! All formulas evaluate the expected adoption fraction `f(t)` of the
//! stochastic model directly. The two- and three-node complete forms are
//! exponential sums whose coefficients blow up when certain rate
//! combinations coincide; those inputs are rejected as singular and callers
//! should fall back to the master-equation solvers.

use thiserror::Error;

/// Errors raised by closed-form evaluators.
#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    /// A coefficient denominator (nearly) vanished for these rates.
    #[error("closed form is singular for these rates: {0}")]
    Singular(String),
    /// Inter-adoption index out of range.
    #[error("adoption index k = {k} out of range 1..={m}")]
    KOutOfRange { k: usize, m: usize },
    /// Rates must be finite, with the stated sign constraints.
    #[error("invalid rate {name} = {value}")]
    BadRate { name: &'static str, value: f64 },
}

fn require_positive(name: &'static str, value: f64) -> Result<(), ClosedFormError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ClosedFormError::BadRate { name, value });
    }
    Ok(())
}

fn require_nonnegative(name: &'static str, value: f64) -> Result<(), ClosedFormError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ClosedFormError::BadRate { name, value });
    }
    Ok(())
}

/// Relative tolerance below which a coefficient denominator counts as
/// singular.
const SINGULAR_REL_TOL: f64 = 1.0e-9;

fn check_denominator(denom: f64, scale: f64, what: &str) -> Result<(), ClosedFormError> {
    if denom.abs() <= SINGULAR_REL_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(ClosedFormError::Singular(format!(
            "denominator {what} = {denom:e} vanishes at scale {scale:e}"
        )));
    }
    Ok(())
}

/// The classical continuum Bass adoption fraction
/// `f(t) = (1 - e^{-(p+q)t}) / (1 + (q/p) e^{-(p+q)t})` with `p > 0`,
/// `q >= 0`.
pub fn bass_formula(t: f64, p: f64, q: f64) -> Result<f64, ClosedFormError> {
    require_positive("p", p)?;
    require_nonnegative("q", q)?;
    let decay = (-(p + q) * t).exp();
    Ok((1.0 - decay) / (1.0 + (q / p) * decay))
}

/// Adoption fraction of the infinite one-sided homogeneous line/circle:
/// `f(t) = 1 - exp(-(p+q)t + q(1 - e^{-pt})/p)` with `p > 0`, `q >= 0`.
pub fn f_1d(t: f64, p: f64, q: f64) -> Result<f64, ClosedFormError> {
    require_positive("p", p)?;
    require_nonnegative("q", q)?;
    Ok(1.0 - (-(p + q) * t + q * (1.0 - (-p * t).exp()) / p).exp())
}

/// Exact adoption fraction of the general two-node network with individual
/// rates `p1, p2 > 0` and influence rates `q12` (node 1 on node 2) and `q21`
/// (node 2 on node 1), both nonnegative.
///
/// Singular when `p2` is too close to `q21` or `p1` to `q12`.
pub fn f_complete_m2(
    t: f64,
    p1: f64,
    p2: f64,
    q12: f64,
    q21: f64,
) -> Result<f64, ClosedFormError> {
    require_positive("p1", p1)?;
    require_positive("p2", p2)?;
    require_nonnegative("q12", q12)?;
    require_nonnegative("q21", q21)?;
    let d1 = p2 - q21;
    check_denominator(d1, p2 + q21, "p2 - q21")?;
    let d2 = p1 - q12;
    check_denominator(d2, p1 + q12, "p1 - q12")?;

    let a1 = p2 / d1;
    let b1 = q21 / d1;
    let a2 = p1 / d2;
    let b2 = q12 / d2;
    let both = (-(p1 + p2) * t).exp();
    let s1 = a1 * (-(p1 + q21) * t).exp() - b1 * both;
    let s2 = a2 * (-(p2 + q12) * t).exp() - b2 * both;
    Ok(1.0 - 0.5 * (s1 + s2))
}

/// Exact adoption fraction of the general three-node network. `p[j] > 0` are
/// the individual rates and `q[i][j] >= 0` is the influence of node `i` on
/// node `j` (diagonal entries must be zero).
///
/// Singular when any coefficient denominator (sums and differences of the
/// rates) nearly vanishes.
pub fn f_complete_m3(t: f64, p: &[f64; 3], q: &[[f64; 3]; 3]) -> Result<f64, ClosedFormError> {
    for (j, &pj) in p.iter().enumerate() {
        if !pj.is_finite() || pj <= 0.0 {
            return Err(ClosedFormError::BadRate {
                name: ["p1", "p2", "p3"][j],
                value: pj,
            });
        }
    }
    for (i, row) in q.iter().enumerate() {
        for (j, &rate) in row.iter().enumerate() {
            if i == j {
                if rate != 0.0 {
                    return Err(ClosedFormError::BadRate {
                        name: "q diagonal",
                        value: rate,
                    });
                }
            } else if !rate.is_finite() || rate < 0.0 {
                return Err(ClosedFormError::BadRate {
                    name: "q off-diagonal",
                    value: rate,
                });
            }
        }
    }

    let p_total = p[0] + p[1] + p[2];
    let mut sum = 0.0;
    for j in 0..3 {
        let j1 = (j + 1) % 3;
        let j2 = (j + 2) % 3;
        let p0 = p[j];
        let p1 = p[j1];
        let p2 = p[j2];
        // Influences around the triangle, seen from node j: the node j + 2
        // doubles as j - 1 modulo three.
        let qa = q[j2][j]; // j - 1 on j
        let qb = q[j1][j]; // j + 1 on j
        let qc = q[j2][j1]; // j + 2 on j + 1
        let qd = q[j1][j2]; // j - 2 on j - 1
        let qe = q[j][j1]; // j on j + 1

        let den1 = p2 - qa - qc;
        check_denominator(den1, p2 + qa + qc, "p[j-1] - q[j-1,j] - q[j+2,j+1]")?;
        let den2 = p1 + qc - qb;
        check_denominator(den2, p1 + qc + qb, "p[j+1] + q[j+2,j+1] - q[j+1,j]")?;
        let den3 = p1 - qd - qb;
        check_denominator(den3, p1 + qd + qb, "p[j+1] - q[j-2,j-1] - q[j+1,j]")?;
        let den4 = p2 + qd - qa;
        check_denominator(den4, p2 + qd + qa, "p[j-1] + q[j-2,j-1] - q[j-1,j]")?;
        let den5 = p1 + p2 - qa - qb;
        check_denominator(den5, p1 + p2 + qa + qb, "p[j+1] + p[j-1] - q[j-1,j] - q[j+1,j]")?;
        let den6 = p0 + qa - qe;
        check_denominator(den6, p0 + qa + qe, "p[j] + q[j-1,j] - q[j,j+1]")?;

        let x = (qa + qc) / den1;
        let y = (qd + qb) / den3;
        let z = (qb * (qa + qc) / den1 + qa * (qd + qb) / den3) / den5;

        let a_j = 1.0 + (1.0 + x) * qb / den2 + (1.0 + y) * qa / den4 - z;
        let b_j = (1.0 + x) * (qb / den2 + qe / den6);
        let c_j = z;

        let e1 = p0 + qa + qb;
        let e2 = p0 + p1 + qa + qc;
        sum += a_j * (-e1 * t).exp() - b_j * (-e2 * t).exp() + c_j * (-p_total * t).exp();
    }
    Ok(1.0 - sum / 3.0)
}

/// The matched two-node pair used in concentration analysis, sharing total
/// individual rate `2p` and total influence rate `2q`:
///
/// - heterogeneous: node 1 holds everything (`p = (2p, 0)`, single influence
///   edge of rate `2q` from node 1 to node 2);
/// - homogeneous: both nodes have rate `p` and influence each other at rate
///   `q`.
///
/// Returns `(f_het, f_hom)`. At `p = q` both reduce to the common limit
/// `1 - (1 + pt) e^{-2pt}`, which is used whenever `|p - q|` is below
/// relative tolerance `1e-12`.
pub fn f_m2_pq_special(t: f64, p: f64, q: f64) -> Result<(f64, f64), ClosedFormError> {
    require_positive("p", p)?;
    require_positive("q", q)?;
    if (p - q).abs() <= 1.0e-12 * p.max(q) {
        let limit = 1.0 - (1.0 + p * t) * (-2.0 * p * t).exp();
        return Ok((limit, limit));
    }
    let e2p = (-2.0 * p * t).exp();
    let e2q = (-2.0 * q * t).exp();
    let f_het = 1.0 - (2.0 * q - p) / (2.0 * (q - p)) * e2p + p / (2.0 * (q - p)) * e2q;
    let f_hom = 1.0 - p / (p - q) * (-(p + q) * t).exp() + q / (p - q) * e2p;
    Ok((f_het, f_hom))
}

/// CDF of the `k`-th inter-adoption time on the homogeneous complete network
/// with `m` nodes: an exponential with rate
/// `(m - k + 1) (p + (k - 1) q / (m - 1))`.
///
/// The inter-adoption times of this network are independent, which is what
/// makes the per-`k` marginal exponential; heterogeneous or sparse networks
/// need [`crate::dominance::bruteforce_interadoption_cdfs`].
pub fn interadoption_cdf_hom_complete(
    m: usize,
    p: f64,
    q: f64,
    k: usize,
    tau: f64,
) -> Result<f64, ClosedFormError> {
    if m == 0 {
        return Err(ClosedFormError::BadRate {
            name: "m",
            value: 0.0,
        });
    }
    require_nonnegative("p", p)?;
    require_nonnegative("q", q)?;
    if k == 0 || k > m {
        return Err(ClosedFormError::KOutOfRange { k, m });
    }
    if tau <= 0.0 {
        return Ok(0.0);
    }
    let social = if k > 1 {
        (k - 1) as f64 * q / (m - 1) as f64
    } else {
        0.0
    };
    let rate = (m - k + 1) as f64 * (p + social);
    Ok(-(-rate * tau).exp_m1())
}
