//! Convex edge energies `s·Σ_e c_e |u_a − u_b|^p − Σ_v f_v u_v` on weighted graphs
//! with Dirichlet data.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Newton steps solved by Jacobi-preconditioned CG, Armijo backtracking.
    Newton,
    /// Gauss–Seidel sweeps, each node a 1-D bisection.
    CoordinateDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Stop when the predicted (Newton) or observed (sweeps) relative energy decrease falls below this.
    pub tol: f64,
    /// Optional bound on `max_v |∂E/∂u_v|` over free vertices.
    pub grad_tol: Option<f64>,
    pub max_iter: usize,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-12, grad_tol: None, max_iter: 500, method: Method::Newton }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    /// `max_v |∂E/∂u_v|` over free vertices.
    pub residual: f64,
}

pub struct Problem<'a> {
    pub g: &'a WeightedGraph,
    pub p: f64,
    pub scale: f64,
    /// Dirichlet value per vertex, `None` = free.
    pub fixed: Vec<Option<f64>>,
    /// Linear load `f_v`.
    pub load: Vec<f64>,
}

const HESSIAN_FLOOR: f64 = 1e-7;
const MAJORISER_FLOOR: f64 = 1e-24;

impl Problem<'_> {
    fn free(&self) -> Vec<usize> {
        (0..self.g.len()).filter(|&v| self.fixed[v].is_none()).collect()
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let e: f64 = self.g.edges.iter().map(|&(a, b, c)| c * (u[a as usize] - u[b as usize]).abs().powf(self.p)).sum();
        self.scale * e - self.load.iter().zip(u).map(|(f, x)| f * x).sum::<f64>()
    }

    /// Full gradient (fixed entries included).
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = self.load.iter().map(|f| -f).collect();
        for &(a, b, c) in &self.g.edges {
            let d = u[a as usize] - u[b as usize];
            let s = self.scale * c * self.p * d.abs().powf(self.p - 1.0) * d.signum();
            g[a as usize] += s;
            g[b as usize] -= s;
        }
        g
    }

    pub fn residual(&self, u: &[f64]) -> f64 {
        let g = self.gradient(u);
        (0..u.len()).filter(|&v| self.fixed[v].is_none()).map(|v| g[v].abs()).fold(0.0, f64::max)
    }

    fn start(&self, init: Option<&[f64]>) -> Vec<f64> {
        (0..self.g.len())
            .map(|v| self.fixed[v].unwrap_or_else(|| init.map_or(0.0, |i| i[v])))
            .collect()
    }

    pub fn solve(&self, opts: &SolveOptions, init: Option<&[f64]>) -> Result<Solution> {
        if !(self.p > 1.0) {
            return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {}", self.p)));
        }
        let mut u = self.start(init);
        if init.is_none() && self.p != 2.0 {
            // A quadratic solve gives a start with nonvanishing increments.
            let quad = Problem { g: self.g, p: 2.0, scale: self.scale, fixed: self.fixed.clone(), load: self.load.clone() };
            let warm = SolveOptions { tol: 1e-6, grad_tol: None, max_iter: 5, method: Method::Newton };
            u = newton(&quad, &warm, u, true)?.u;
        }
        match opts.method {
            Method::Newton => newton(self, opts, u, false),
            Method::CoordinateDescent => coordinate_descent(self, opts, u),
        }
    }
}

/// Newton weights for `p ≥ 2`; for `p < 2` the majorising weights `p|d|^{p−2}`, since
/// `|d|^p` is concave in `d²` there and the true Hessian is unbounded at `d = 0`.
fn hessian_weights(pr: &Problem, u: &[f64]) -> Vec<f64> {
    let (k, floor) = if pr.p >= 2.0 { (pr.scale * pr.p * (pr.p - 1.0), HESSIAN_FLOOR) } else { (pr.scale * pr.p, MAJORISER_FLOOR) };
    pr.g
        .edges
        .iter()
        .map(|&(a, b, c)| k * c * (u[a as usize] - u[b as usize]).abs().max(floor).powf(pr.p - 2.0))
        .collect()
}

/// Solves `H s = r` on free vertices, `H` the weighted Laplacian with `w`.
fn pcg(pr: &Problem, w: &[f64], is_free: &[bool], r: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
    let n = pr.g.len();
    let mut diag = vec![0.0; n];
    for (e, &(a, b, _)) in pr.g.edges.iter().enumerate() {
        diag[a as usize] += w[e];
        diag[b as usize] += w[e];
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (e, &(a, b, _)) in pr.g.edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let f = w[e] * (x[a] - x[b]);
            out[a] += f;
            out[b] -= f;
        }
        for v in 0..n {
            if !is_free[v] {
                out[v] = 0.0;
            }
        }
    };
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let precond = |x: &[f64]| -> Vec<f64> { (0..n).map(|v| if is_free[v] && diag[v] > 0.0 { x[v] / diag[v] } else { 0.0 }).collect() };
    let mut x = vec![0.0; n];
    let mut res: Vec<f64> = (0..n).map(|v| if is_free[v] { r[v] } else { 0.0 }).collect();
    let r0 = dot(&res, &res).sqrt();
    if r0 == 0.0 {
        return x;
    }
    let mut z = precond(&res);
    let mut d = z.clone();
    let mut rz = dot(&res, &z);
    let mut hd = vec![0.0; n];
    for _ in 0..max_iter {
        apply(&d, &mut hd);
        let dhd = dot(&d, &hd);
        if !(dhd > 0.0) {
            break;
        }
        let alpha = rz / dhd;
        for v in 0..n {
            x[v] += alpha * d[v];
            res[v] -= alpha * hd[v];
        }
        if dot(&res, &res).sqrt() <= rel_tol * r0 {
            break;
        }
        z = precond(&res);
        let rz_new = dot(&res, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for v in 0..n {
            d[v] = z[v] + beta * d[v];
        }
    }
    x
}

fn newton(pr: &Problem, opts: &SolveOptions, mut u: Vec<f64>, quadratic_warmup: bool) -> Result<Solution> {
    let n = pr.g.len();
    let is_free: Vec<bool> = pr.fixed.iter().map(|f| f.is_none()).collect();
    let nfree = pr.free().len();
    let mut energy = pr.energy(&u);
    let cg_cap = (4 * nfree).clamp(50, 20_000);
    for it in 1..=opts.max_iter {
        let grad = pr.gradient(&u);
        let gmax = (0..n).filter(|&v| is_free[v]).map(|v| grad[v].abs()).fold(0.0, f64::max);
        if gmax == 0.0 {
            return Ok(Solution { u, energy, iterations: it - 1, residual: 0.0 });
        }
        let w = hessian_weights(pr, &u);
        let minus_g: Vec<f64> = grad.iter().map(|x| -x).collect();
        let gnorm = grad.iter().enumerate().filter(|(v, _)| is_free[*v]).map(|(_, x)| x * x).sum::<f64>().sqrt();
        let forcing = if quadratic_warmup { 1e-10 } else { (gnorm.sqrt()).clamp(1e-12, 0.1) };
        let s = pcg(pr, &w, &is_free, &minus_g, forcing, cg_cap);
        let slope: f64 = (0..n).map(|v| grad[v] * s[v]).sum();
        let decrement = -slope;
        let grad_ok = opts.grad_tol.is_none_or(|t| gmax <= t);
        if decrement <= opts.tol * energy.abs().max(1e-300) && grad_ok {
            return Ok(Solution { u, energy, iterations: it - 1, residual: gmax });
        }
        if !(slope < 0.0) {
            break;
        }
        // Below rounding the energy cannot rank trial points; the free gradient can.
        let rounding = decrement <= 1e-13 * energy.abs().max(1e-300);
        let mut alpha = 1.0;
        let mut trial = u.clone();
        let mut accepted = false;
        for _ in 0..50 {
            for v in 0..n {
                trial[v] = u[v] + alpha * s[v];
            }
            let e = pr.energy(&trial);
            let ok = if rounding { pr.residual(&trial) < gmax } else { e <= energy + 1e-4 * alpha * slope };
            if ok {
                energy = e;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // Rounding floor reached.
            let residual = pr.residual(&u);
            if opts.grad_tol.is_none_or(|t| residual <= t) {
                return Ok(Solution { u, energy, iterations: it, residual });
            }
            return Err(Error::NoConvergence { what: "newton line search", iterations: it, residual });
        }
        std::mem::swap(&mut u, &mut trial);
        if quadratic_warmup && it >= 2 {
            let residual = pr.residual(&u);
            return Ok(Solution { u, energy, iterations: it, residual });
        }
    }
    let residual = pr.residual(&u);
    if quadratic_warmup {
        return Ok(Solution { u, energy, iterations: opts.max_iter, residual });
    }
    Err(Error::NoConvergence { what: "newton", iterations: opts.max_iter, residual })
}

fn coordinate_descent(pr: &Problem, opts: &SolveOptions, mut u: Vec<f64>) -> Result<Solution> {
    let free = pr.free();
    let g = pr.g;
    let local_deriv = |u: &[f64], v: usize, x: f64| -> f64 {
        let mut s = -pr.load[v];
        for &(w, e) in g.neighbors(v) {
            let d = x - u[w as usize];
            s += pr.scale * g.conductance(e as usize) * pr.p * d.abs().powf(pr.p - 1.0) * d.signum();
        }
        s
    };
    let mut energy = pr.energy(&u);
    for sweep in 1..=opts.max_iter {
        for &v in &free {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                continue;
            }
            let (mut lo, mut hi) = nb.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &(w, _)| (l.min(u[w as usize]), h.max(u[w as usize])));
            let mut width = (hi - lo).max(1.0);
            while local_deriv(&u, v, lo) > 0.0 {
                lo -= width;
                width *= 2.0;
            }
            while local_deriv(&u, v, hi) < 0.0 {
                hi += width;
                width *= 2.0;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if local_deriv(&u, v, mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            u[v] = 0.5 * (lo + hi);
        }
        let next = pr.energy(&u);
        let rel = (energy - next).abs() / next.abs().max(1e-300);
        energy = next;
        let residual = || pr.residual(&u);
        if rel < opts.tol && opts.grad_tol.is_none_or(|t| residual() <= t) {
            let residual = pr.residual(&u);
            return Ok(Solution { u, energy, iterations: sweep, residual });
        }
    }
    Err(Error::NoConvergence { what: "coordinate descent", iterations: opts.max_iter, residual: pr.residual(&u) })
}
