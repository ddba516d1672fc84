//! Sub-Riemannian distance by minimizing over piecewise-constant horizontal
//! controls.
//!
//! A control with `N` equal-time segments of horizontal displacement `d_k`
//! ends at `z = Σ d_k`, `t = −2 Σ_{j<k} d_j × d_k`. Energy `N Σ|d_k|²`
//! is minimized under both constraints with a multiplier on `t`; the
//! minimizer has constant speed so its length is `Σ|d_k|`. Lengths for
//! several `N` are Romberg-extrapolated.

use super::HeisPoint;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const N_START: usize = 8;
const N_MAX: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcReport {
    pub distance: f64,
    /// Finest segment count used.
    pub segments: usize,
    /// Difference of the last two extrapolants.
    pub error_estimate: f64,
}

pub fn cc_dist(p: &HeisPoint, q: &HeisPoint, tol: f64) -> Result<f64> {
    cc_dist_report(p, q, tol).map(|r| r.distance)
}

pub fn cc_dist_report(p: &HeisPoint, q: &HeisPoint, tol: f64) -> Result<CcReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::NonFinite("cc_dist endpoint"));
    }
    let g = p.inv().mul(q);
    let zn = (g.x * g.x + g.y * g.y).sqrt();
    if zn == 0.0 && g.t == 0.0 {
        return Ok(CcReport { distance: 0.0, segments: 0, error_estimate: 0.0 });
    }
    if g.t == 0.0 {
        return Ok(CcReport { distance: zn, segments: 1, error_estimate: 0.0 });
    }
    // Work at unit scale: d(δ_s g) = s d(g).
    let scale = zn.max(g.t.abs().sqrt());
    let g = g.dilate(1.0 / scale);

    // Romberg table over n = 8, 16, 32, ...; the error expands in even powers of 1/n.
    let mut n = N_START;
    let mut rows: Vec<Vec<f64>> = vec![vec![polygon_length(g.x, g.y, g.t, n)]];
    let mut err = f64::INFINITY;
    let mut best = rows[0][0];
    while n < N_MAX {
        n *= 2;
        let prev = rows.last().unwrap().clone();
        let mut row = vec![polygon_length(g.x, g.y, g.t, n)];
        for j in 1..=prev.len() {
            let f = 4f64.powi(j as i32);
            row.push((f * row[j - 1] - prev[j - 1]) / (f - 1.0));
        }
        let k = row.len() - 1;
        err = (row[k] - prev[k - 1]).abs();
        best = row[k];
        rows.push(row);
        if rows.len() >= 3 && err <= tol * best {
            return Ok(CcReport { distance: best * scale, segments: n, error_estimate: err * scale });
        }
    }
    Err(Error::NoConvergence { what: "cc_dist", iterations: n, residual: err / best })
}

/// Shortest `n`-segment horizontal polygon from the identity to `(zx, zy, tau)`.
pub(crate) fn polygon_length(zx: f64, zy: f64, tau: f64, n: usize) -> f64 {
    let dim = 2 * n;
    let m = dim - 2;
    let nf = n as f64;

    // Quadratic form with d·T·d = endpoint height.
    let mut tm = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        for k in (j + 1)..n {
            tm[(2 * j, 2 * k + 1)] = -1.0;
            tm[(2 * k + 1, 2 * j)] = -1.0;
            tm[(2 * j + 1, 2 * k)] = 1.0;
            tm[(2 * k, 2 * j + 1)] = 1.0;
        }
    }
    // Orthonormal basis of {Σ d_k = 0}: cosine modes per coordinate.
    let mut basis = DMatrix::<f64>::zeros(dim, m);
    let norm = (2.0 / nf).sqrt();
    for mode in 1..n {
        for k in 0..n {
            let v = norm * (PI * mode as f64 * (k as f64 + 0.5) / nf).cos();
            basis[(2 * k, 2 * (mode - 1))] = v;
            basis[(2 * k + 1, 2 * (mode - 1) + 1)] = v;
        }
    }
    let mut d0 = DVector::<f64>::zeros(dim);
    for k in 0..n {
        d0[2 * k] = zx / nf;
        d0[2 * k + 1] = zy / nf;
    }
    let tb = &tm * &basis;
    let s = basis.transpose() * &tb;
    let b = tb.transpose() * &d0;
    let eig = SymmetricEigen::new(s);
    let sig = eig.eigenvalues.clone();
    let beta = eig.eigenvectors.transpose() * &b;

    let height = |omega: &DVector<f64>| -> f64 {
        let mut h = 0.0;
        for i in 0..m {
            h += 2.0 * beta[i] * omega[i] + sig[i] * omega[i] * omega[i];
        }
        h
    };
    let omega_at = |lam: f64| -> DVector<f64> {
        DVector::from_iterator(m, (0..m).map(|i| lam * beta[i] / (nf - lam * sig[i])))
    };

    let (imax, imin) = {
        let mut imax = 0;
        let mut imin = 0;
        for i in 0..m {
            if sig[i] > sig[imax] {
                imax = i;
            }
            if sig[i] < sig[imin] {
                imin = i;
            }
        }
        (imax, imin)
    };
    let zn2 = zx * zx + zy * zy;
    let omega = if zn2 <= 1e-16 * tau.abs() {
        eigen_solution(m, if tau > 0.0 { imax } else { imin }, sig[if tau > 0.0 { imax } else { imin }], tau)
    } else {
        let lam_end = if tau > 0.0 { nf / sig[imax] } else { nf / sig[imin] };
        // Height is monotone in the multiplier; bisect on the fraction of the admissible interval.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let reach = height(&omega_at(lam_end * (1.0 - f64::EPSILON)));
        if (tau > 0.0 && reach < tau) || (tau < 0.0 && reach > tau) {
            eigen_solution(m, if tau > 0.0 { imax } else { imin }, sig[if tau > 0.0 { imax } else { imin }], tau)
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let h = height(&omega_at(lam_end * mid));
                if (h < tau) == (tau > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON {
                    break;
                }
            }
            omega_at(lam_end * 0.5 * (lo + hi))
        }
    };
    let w = &eig.eigenvectors * omega;
    let d = d0 + &basis * w;
    (0..n).map(|k| d[2 * k].hypot(d[2 * k + 1])).sum()
}

fn eigen_solution(m: usize, i: usize, sigma: f64, tau: f64) -> DVector<f64> {
    let mut omega = DVector::<f64>::zeros(m);
    omega[i] = (tau / sigma).abs().sqrt();
    omega
}
