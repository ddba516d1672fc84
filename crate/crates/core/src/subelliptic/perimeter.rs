//! Horizontal perimeter of node sets and the coarea balance.
//!
//! On grids the perimeter is a weighted cut over horizontal flow edges
//! `n → n·exp(h(aX + bY))`. With the axis stencil every crossing x- or y-edge
//! carries the face measure `h·h² = h³`, which measures `|ν_x| + |ν_y|` rather
//! than the horizontal normal length. The Crofton stencil uses every primitive
//! `(a, b)` with `max(|a|,|b|) ≤ M` and weights `½Δφ·h³/|(a,b)|`, which
//! integrates `|cos(θ − φ)|` over directions and measures `|ν_H|`.

use super::grid::{HeisGrid, SubellipticField};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Polynomial;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerimeterMethod {
    AxisCut,
    Crofton { order: usize },
    /// Crofton with order `max(1, round(log₂(1/h)) − 2)`.
    CroftonAuto,
}

/// `max(1, round(log₂(1/h)) − 2)`.
pub fn crofton_order(h: f64) -> usize {
    ((1.0 / h).log2().round() as i64 - 2).max(1) as usize
}

/// `(a, b, weight)` per undirected horizontal edge direction.
pub fn edge_directions(method: PerimeterMethod, h: f64) -> Vec<(i64, i64, f64)> {
    let h3 = h.powi(3);
    let order = match method {
        PerimeterMethod::AxisCut => return vec![(1, 0, h3), (0, 1, h3)],
        PerimeterMethod::Crofton { order } => order.max(1),
        PerimeterMethod::CroftonAuto => crofton_order(h),
    };
    let m = order as i64;
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let mut dirs: Vec<(i64, i64, f64)> = Vec::new();
    for a in -m..=m {
        for b in 0..=m {
            if (a, b) == (0, 0) || gcd(a, b) != 1 || (b == 0 && a < 0) {
                continue;
            }
            dirs.push((a, b, (b as f64).atan2(a as f64)));
        }
    }
    dirs.sort_by(|x, y| x.2.total_cmp(&y.2));
    let n = dirs.len();
    let pi = std::f64::consts::PI;
    (0..n)
        .map(|i| {
            let next = if i + 1 == n { dirs[0].2 + pi } else { dirs[i + 1].2 };
            let prev = if i == 0 { dirs[n - 1].2 - pi } else { dirs[i - 1].2 };
            let (a, b, _) = dirs[i];
            let arc = 0.5 * (next - prev);
            (a, b, 0.5 * arc * h3 / ((a * a + b * b) as f64).sqrt())
        })
        .collect()
}

/// Grid edges `(from, to, weight)`; with a window, an edge carries the mean of its endpoint weights.
fn weighted_edges(grid: &HeisGrid, method: PerimeterMethod, window: Option<&[f64]>) -> Vec<(u32, u32, f64)> {
    let dirs = edge_directions(method, grid.h);
    let mut out = Vec::new();
    for n in 0..grid.len() {
        for &(a, b, w) in &dirs {
            if let Some(m) = grid.flow_step(n, a, b) {
                let ww = window.map_or(1.0, |win| 0.5 * (win[n] + win[m]));
                if ww > 0.0 {
                    out.push((n as u32, m as u32, w * ww));
                }
            }
        }
    }
    out
}

/// Weighted horizontal cut of `set` on a grid, optionally weighted by a window.
pub fn perimeter_estimate_grid(grid: &HeisGrid, set: &[bool], window: Option<&[f64]>, method: PerimeterMethod) -> Result<f64> {
    if set.len() != grid.len() || window.is_some_and(|w| w.len() != grid.len()) {
        return Err(Error::InvalidArgument("mask length does not match grid".into()));
    }
    Ok(weighted_edges(grid, method, window)
        .iter()
        .filter(|(a, b, _)| set[*a as usize] != set[*b as usize])
        .map(|e| e.2)
        .sum())
}

/// Edge-cut weight of `set`, restricted to edges inside `window` when given.
pub fn perimeter_estimate_graph(g: &WeightedGraph, set: &[bool], window: Option<&[bool]>) -> f64 {
    g.edge_cut(set, window)
}

/// `∫ P({u > s}) ds` by sweeping the finite set of levels at which the cut changes.
/// Between consecutive levels the superlevel set is constant, so the midpoint rule is exact.
pub fn level_integral(values: &[f64], edges: &[(u32, u32, f64)]) -> f64 {
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * edges.len());
    for &(a, b, w) in edges {
        let (x, y) = (values[a as usize], values[b as usize]);
        if x != y {
            events.push((x.min(y), w));
            events.push((x.max(y), -w));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut total, mut current) = (0.0, 0.0);
    let mut i = 0;
    while i < events.len() {
        let level = events[i].0;
        while i < events.len() && events[i].0 == level {
            current += events[i].1;
            i += 1;
        }
        if let Some(&(next, _)) = events.get(i) {
            total += current * (next - level);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaConfig {
    /// Vertical extent `T` of the window `[0,1]² × [0,T]`.
    pub t_extent: f64,
    pub method: PerimeterMethod,
}

impl Default for CoareaConfig {
    fn default() -> Self {
        CoareaConfig { t_extent: 0.125, method: PerimeterMethod::CroftonAuto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaRow {
    pub h: f64,
    pub nodes: usize,
    pub directions: usize,
    /// `∫ |∇_H u| dμ` over the window.
    pub lhs: f64,
    /// `∫ P({u > s}, window) ds`.
    pub rhs: f64,
    pub rel_error: f64,
}

/// Window weights and a grid padded so that every stencil and flow edge leaving the window exists.
pub fn coarea_grid(h: f64, cfg: &CoareaConfig) -> Result<(HeisGrid, Vec<f64>)> {
    let n = (1.0 / h).round() as i64;
    let nt = (cfg.t_extent / (h * h)).round() as i64;
    if n < 1 || nt < 1 || ((n as f64) * h - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("spacing {h} must divide 1 and resolve t_extent")));
    }
    let reach = match cfg.method {
        PerimeterMethod::AxisCut => 1,
        PerimeterMethod::Crofton { order } => order.max(1) as i64,
        PerimeterMethod::CroftonAuto => crofton_order(h) as i64,
    };
    let pad_k = 2 * reach * 2 * (n + reach) + 1;
    let grid = HeisGrid::new(h, (-reach, n + reach), (-reach, n + reach), (-pad_k, nt + pad_k))?;
    let axis = |v: i64, hi: i64| if v < 0 || v > hi { 0.0 } else if v == 0 || v == hi { 0.5 } else { 1.0 };
    let window = (0..grid.len())
        .map(|idx| {
            let (i, j, k) = grid.ijk(idx);
            axis(i, n) * axis(j, n) * axis(k, nt)
        })
        .collect();
    Ok((grid, window))
}

pub fn coarea_row(u: &Polynomial, h: f64, cfg: &CoareaConfig) -> Result<CoareaRow> {
    if u.dim != 3 {
        return Err(Error::InvalidArgument(format!("test function must live on R³, got dimension {}", u.dim)));
    }
    let (grid, window) = coarea_grid(h, cfg)?;
    let field = SubellipticField::from_fn(grid, |q| u.value(&q.to_array()))?;
    let mut lhs = 0.0;
    for (n, &w) in window.iter().enumerate() {
        if w > 0.0 {
            let (a, b) = field.horizontal_gradient(n)?;
            lhs += w * (a * a + b * b).sqrt();
        }
    }
    lhs *= grid.cell_measure();
    let edges = weighted_edges(&grid, cfg.method, Some(&window));
    let rhs = level_integral(&field.values, &edges);
    let rel_error = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / lhs.abs().max(rhs.abs()) };
    Ok(CoareaRow { h, nodes: grid.len(), directions: edge_directions(cfg.method, h).len(), lhs, rhs, rel_error })
}

/// One row per resolution.
pub fn coarea_check(u: &Polynomial, resolutions: &[f64], cfg: &CoareaConfig) -> Result<Vec<CoareaRow>> {
    resolutions.iter().map(|&h| coarea_row(u, h, cfg)).collect()
}
