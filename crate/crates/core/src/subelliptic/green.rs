use super::solver::{Problem, SolveOptions};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenResult {
    pub values: Vec<f64>,
    /// `max_v |Σ_e c_e |dG|^{p−2} dG · dδ_v − δ_v(y)|` over free vertices.
    pub residual: f64,
    pub iterations: usize,
}

/// Minimiser of `(1/p)Σ c_e|du|^p − u(y)` with `u = 0` on the boundary.
pub fn green_function(g: &WeightedGraph, pole: usize, p: f64, tol: f64) -> Result<GreenResult> {
    if pole >= g.len() {
        return Err(Error::InvalidArgument(format!("pole {pole} out of range")));
    }
    if g.boundary[pole] {
        return Err(Error::InvalidArgument("pole lies on the boundary".into()));
    }
    let comp = g.components();
    if !(0..g.len()).any(|v| g.boundary[v] && comp[v] == comp[pole]) {
        return Err(Error::EmptyBoundary);
    }
    let fixed = (0..g.len()).map(|v| if g.boundary[v] || comp[v] != comp[pole] { Some(0.0) } else { None }).collect();
    let mut load = vec![0.0; g.len()];
    load[pole] = 1.0;
    let pr = Problem { g, p, scale: 1.0 / p, fixed, load };
    let opts = SolveOptions { tol: 1e-15, grad_tol: Some(tol), max_iter: 500, ..SolveOptions::default() };
    let sol = pr.solve(&opts, None)?;
    Ok(GreenResult { values: sol.u, residual: sol.residual, iterations: sol.iterations })
}

/// `Σ_e c_e |dG|^{p−2} dG · dφ − φ(y)`.
pub fn weak_identity_residual(g: &WeightedGraph, green: &[f64], pole: usize, p: f64, phi: &[f64]) -> f64 {
    let lhs: f64 = g
        .edges
        .iter()
        .map(|&(a, b, c)| {
            let d = green[a as usize] - green[b as usize];
            c * d.abs().powf(p - 2.0) * d * (phi[a as usize] - phi[b as usize])
        })
        .filter(|x| x.is_finite())
        .sum();
    lhs - phi[pole]
}
