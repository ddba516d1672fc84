use super::grid::{HeisGrid, SubellipticField};
use crate::error::{Error, Result};
use crate::heis::{gauge_dist, Gauge, HeisPoint};
use crate::scalar::Polynomial;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareConfig {
    pub h: f64,
    /// Enlargement of the gradient ball.
    pub c: f64,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        PoincareConfig { h: 1.0 / 8.0, c: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    /// `(⨍_B |u − u_B|^{4/3})^{3/4}`.
    pub lhs: f64,
    /// `⨍_{cB} |∇_H u|`.
    pub rhs: f64,
    pub ratio: f64,
    pub ball_nodes: usize,
    pub big_nodes: usize,
    /// Nonconstant `u` with vanishing discrete gradient: the ratio is `∞`.
    pub artifact: bool,
}

/// `lhs / (ε·rhs)` on L∞-gauge balls `B(center, ε) ⊂ B(center, cε)`.
pub fn poincare_ratio(center: &HeisPoint, eps: f64, u: &Polynomial, cfg: &PoincareConfig) -> Result<PoincareReport> {
    if !(eps > 0.0) || !(cfg.c >= 1.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and c ≥ 1, got {eps}, {}", cfg.c)));
    }
    if u.dim != 3 {
        return Err(Error::InvalidArgument(format!("test function must live on R³, got dimension {}", u.dim)));
    }
    let r = cfg.c * eps;
    let dt = r * r + 2.0 * r * (center.x.abs() + center.y.abs());
    let m = 2.0 * cfg.h;
    let grid = HeisGrid::covering(
        cfg.h,
        [center.x - r - m, center.y - r - m, center.t - dt - m * m],
        [center.x + r + m, center.y + r + m, center.t + dt + m * m],
    )?;
    let field = SubellipticField::from_fn(grid, |q| u.value(&q.to_array()))?;
    let g = Gauge::LInfty;
    let (mut small, mut big) = (Vec::new(), Vec::new());
    for n in 0..grid.len() {
        let d = gauge_dist(g, center, &grid.point(n));
        if d < r {
            big.push(n);
            if d < eps {
                small.push(n);
            }
        }
    }
    if small.is_empty() {
        return Err(Error::InvalidArgument(format!("ball of radius {eps} contains no nodes at spacing {}", cfg.h)));
    }
    let vals: Vec<f64> = small.iter().map(|&n| field.values[n]).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let q = 4.0 / 3.0;
    let lhs = (vals.iter().map(|v| (v - mean).abs().powf(q)).sum::<f64>() / vals.len() as f64).powf(1.0 / q);
    let mut grad = 0.0;
    for &n in &big {
        let (a, b) = field.horizontal_gradient(n)?;
        grad += (a * a + b * b).sqrt();
    }
    let rhs = grad / big.len() as f64;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let (ratio, artifact) = if lhs <= 1e-14 * scale {
        (0.0, false)
    } else if rhs == 0.0 {
        (f64::INFINITY, true)
    } else {
        (lhs / (eps * rhs), false)
    };
    Ok(PoincareReport { lhs, rhs, ratio, ball_nodes: small.len(), big_nodes: big.len(), artifact })
}

/// Ratios for each named test function and the empirical constant (their maximum).
pub fn poincare_sweep(
    center: &HeisPoint,
    eps: f64,
    family: &[(String, Polynomial)],
    cfg: &PoincareConfig,
) -> Result<(Vec<(String, PoincareReport)>, f64)> {
    let rows: Vec<(String, PoincareReport)> =
        family.iter().map(|(name, u)| Ok((name.clone(), poincare_ratio(center, eps, u, cfg)?))).collect::<Result<_>>()?;
    let max = rows.iter().map(|(_, r)| r.ratio).fold(0.0, f64::max);
    Ok((rows, max))
}
